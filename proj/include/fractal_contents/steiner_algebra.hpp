#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fractal_contents {

/** Dense square matrix, row major. */
struct Matrix {
    int n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static Matrix identity(int size)
    {
        Matrix m(size);
        for (int i = 0; i < size; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix operator*(const Matrix& x, const Matrix& y)
{
    Matrix r(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            double v = x(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
        }
    return r;
}

inline double max_abs_diff(const Matrix& x, const Matrix& y)
{
    double m = 0.0;
    for (std::size_t k = 0; k < x.a.size(); ++k) m = std::max(m, std::abs(x.a[k] - y.a[k]));
    return m;
}

namespace detail {

// Gamma(k/2 + 1) for integer k >= 0. Integer arguments are factorials, half
// integers climb from Gamma(1/2) = sqrt(pi).
inline double gamma_half_plus_one(int k)
{
    double g;
    double x;
    if (k % 2 == 0) {
        g = 1.0;
        x = 1.0;
    } else {
        g = std::sqrt(std::numbers::pi);
        x = 0.5;
    }
    double target = k / 2.0 + 1.0;
    while (x < target) {
        g *= x;
        x += 1.0;
    }
    return g;
}

inline double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(Matrix m)
{
    double det = 1.0;
    for (int c = 0; c < m.n; ++c) {
        int p = c;
        for (int r = c + 1; r < m.n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
        if (m(p, c) == 0.0) return 0.0;
        if (p != c) {
            for (int j = 0; j < m.n; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < m.n; ++r) {
            double f = m(r, c) / m(c, c);
            for (int j = c; j < m.n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

inline Matrix minor_of(const Matrix& m, int row, int col)
{
    Matrix r(m.n - 1);
    for (int i = 0, ri = 0; i < m.n; ++i) {
        if (i == row) continue;
        for (int j = 0, rj = 0; j < m.n; ++j) {
            if (j == col) continue;
            r(ri, rj++) = m(i, j);
        }
        ++ri;
    }
    return r;
}

} // namespace detail

struct UnitBallConstants {
    std::vector<double> kappa; // kappa[0..d]
    std::vector<double> omega; // omega[k] for k = 1..d, omega[0] unused (0)
};

/** Volumes kappa_0..kappa_d and surface areas omega_1..omega_d of unit balls. */
inline UnitBallConstants unit_ball_constants(int d)
{
    if (d < 1) throw std::domain_error("unit_ball_constants: d must be >= 1");
    UnitBallConstants c;
    c.kappa.resize(d + 1);
    c.omega.assign(d + 1, 0.0);
    for (int k = 0; k <= d; ++k) {
        c.kappa[k] = std::pow(std::numbers::pi, k / 2.0) / detail::gamma_half_plus_one(k);
        if (k >= 1) c.omega[k] = k * c.kappa[k];
    }
    return c;
}

inline Matrix steiner_matrix(int d)
{
    if (d < 2) throw std::domain_error("steiner_matrix: d must be >= 2");
    auto k = unit_ball_constants(d).kappa;
    Matrix c(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j)
            c(i, j) = detail::binomial(d - j, d - i) * k[d - j] / k[d - i];
    return c;
}

/** Inverse by forward substitution on a unit lower-triangular matrix. */
inline Matrix triangular_inverse(const Matrix& c)
{
    Matrix b(c.n);
    for (int j = 0; j < c.n; ++j) {
        b(j, j) = 1.0;
        for (int i = j + 1; i < c.n; ++i) {
            double s = 0.0;
            for (int k = j; k < i; ++k) s += c(i, k) * b(k, j);
            b(i, j) = -s;
        }
    }
    return b;
}

/** Inverse via b_ij = (-1)^{i+j} det(C with row j and column i removed); det C = 1. */
inline Matrix cofactor_inverse(const Matrix& c)
{
    Matrix b(c.n);
    for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.n; ++j) {
            double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            b(i, j) = c.n == 1 ? 1.0 : sign * detail::determinant(detail::minor_of(c, j, i));
        }
    return b;
}

inline Matrix inverse_matrix(int d)
{
    Matrix c = steiner_matrix(d);
    Matrix b1 = cofactor_inverse(c);
    Matrix b2 = triangular_inverse(c);
    for (std::size_t k = 0; k < b1.a.size(); ++k) {
        double scale = std::max(1.0, std::abs(b2.a[k]));
        if (std::abs(b1.a[k] - b2.a[k]) > 1e-12 * scale)
            throw consistency_error("inverse_matrix: cofactor and triangular inverses disagree at d=" +
                                    std::to_string(d));
    }
    // the cofactor route leaves tiny noise above the diagonal
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) b2(i, j) = 0.0;
    return b2;
}

struct SteinerCoefficients {
    int dim = 0;
    std::vector<double> kappa;
    std::vector<double> omega;
    Matrix C;
    Matrix B;

    explicit SteinerCoefficients(int d) : dim(d)
    {
        auto u = unit_ball_constants(d);
        kappa = std::move(u.kappa);
        omega = std::move(u.omega);
        if (d >= 2) {
            C = steiner_matrix(d);
            B = inverse_matrix(d);
        } else {
            C = Matrix::identity(1);
            B = Matrix::identity(1);
        }
    }
};

} // namespace fractal_contents
