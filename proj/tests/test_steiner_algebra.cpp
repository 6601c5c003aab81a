#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fractal_contents/steiner_algebra.hpp"

using namespace fractal_contents;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

constexpr double pi = std::numbers::pi;

TEST_CASE("unit ball volumes match the closed forms")
{
    auto u = unit_ball_constants(5);
    // kappa_k by hand: 1, 2, pi, 4pi/3, pi^2/2, 8pi^2/15
    const double want[] = {1.0, 2.0, pi, 4.0 * pi / 3.0, pi * pi / 2.0, 8.0 * pi * pi / 15.0};
    for (int k = 0; k <= 5; ++k) CHECK_THAT(u.kappa[k], WithinRel(want[k], 1e-14));
    CHECK_THAT(u.omega[1], WithinRel(2.0, 1e-14));
    CHECK_THAT(u.omega[2], WithinRel(2.0 * pi, 1e-14));
    CHECK_THAT(u.omega[3], WithinRel(4.0 * pi, 1e-14));
}

TEST_CASE("unit ball volumes satisfy the dimension recursion")
{
    // kappa_k = 2 pi / k * kappa_{k-2}
    auto u = unit_ball_constants(12);
    for (int k = 2; k <= 12; ++k) CHECK_THAT(u.kappa[k], WithinRel(2.0 * pi / k * u.kappa[k - 2], 1e-13));
}

TEST_CASE("unit_ball_constants rejects d < 1")
{
    CHECK_THROWS_AS(unit_ball_constants(0), std::domain_error);
    CHECK_THROWS_AS(steiner_matrix(1), std::domain_error);
}

TEST_CASE("planar Steiner matrix and inverse")
{
    Matrix c = steiner_matrix(2);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(0, 1) == 0.0);
    CHECK_THAT(c(1, 0), WithinRel(pi, 1e-15));
    CHECK(c(1, 1) == 1.0);
    Matrix b = inverse_matrix(2);
    CHECK_THAT(b(1, 0), WithinRel(-pi, 1e-15));
}

TEST_CASE("d = 3 entries by hand")
{
    Matrix c = steiner_matrix(3);
    CHECK_THAT(c(1, 0), WithinRel(4.0, 1e-14));
    CHECK_THAT(c(2, 0), WithinRel(2.0 * pi, 1e-14));
    CHECK_THAT(c(2, 1), WithinRel(pi, 1e-14));
    Matrix b = inverse_matrix(3);
    CHECK_THAT(b(1, 0), WithinRel(-4.0, 1e-14));
    CHECK_THAT(b(2, 1), WithinRel(-pi, 1e-14));
    // b20 = -c20 + c21 c10
    CHECK_THAT(b(2, 0), WithinRel(2.0 * pi, 1e-13));
}

TEST_CASE("C B and B C are the identity up to d = 10")
{
    for (int d = 2; d <= 10; ++d) {
        Matrix c = steiner_matrix(d), b = inverse_matrix(d);
        double scale = 1.0;
        for (double v : c.a) scale = std::max(scale, std::abs(v));
        CHECK(max_abs_diff(c * b, Matrix::identity(d)) < 1e-12 * scale * scale);
        CHECK(max_abs_diff(b * c, Matrix::identity(d)) < 1e-12 * scale * scale);
    }
}

TEST_CASE("C B = B C = I entrywise within 1e-12 for d = 2..8")
{
    for (int d = 2; d <= 8; ++d) {
        Matrix c = steiner_matrix(d), b = inverse_matrix(d);
        CHECK(max_abs_diff(c * b, Matrix::identity(d)) < 1e-12);
        CHECK(max_abs_diff(b * c, Matrix::identity(d)) < 1e-12);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j <= i; ++j) CHECK(c(i, j) > 0.0);
    }
}

TEST_CASE("cofactor and triangular inverses agree")
{
    for (int d = 2; d <= 8; ++d) {
        Matrix c = steiner_matrix(d);
        Matrix b1 = cofactor_inverse(c), b2 = triangular_inverse(c);
        for (std::size_t k = 0; k < b1.a.size(); ++k)
            CHECK_THAT(b1.a[k], WithinAbs(b2.a[k], 1e-11 * std::max(1.0, std::abs(b2.a[k]))));
    }
}

TEST_CASE("Steiner matrix is unit lower triangular")
{
    for (int d = 2; d <= 9; ++d) {
        Matrix c = steiner_matrix(d);
        for (int i = 0; i < d; ++i) {
            CHECK(c(i, i) == 1.0);
            for (int j = i + 1; j < d; ++j) CHECK(c(i, j) == 0.0);
        }
    }
}

TEST_CASE("triangular_inverse on random unit lower triangular matrices")
{
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + trial % 7;
        Matrix m(n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = 1.0;
            for (int j = 0; j < i; ++j) m(i, j) = U(rng);
        }
        CHECK(max_abs_diff(m * triangular_inverse(m), Matrix::identity(n)) < 1e-9);
    }
}

TEST_CASE("Steiner polynomial of a disc through C")
{
    // mu_1 of a convex body is half its perimeter: mu_1(B(R + eps)) = pi (R + eps)
    SteinerCoefficients co(2);
    const double R = 0.7;
    for (double eps : {0.01, 0.3, 2.0}) {
        double mu1 = co.C(1, 0) * eps * 1.0 + co.C(1, 1) * pi * R;
        CHECK_THAT(mu1, WithinRel(pi * (R + eps), 1e-14));
    }
}

TEST_CASE("SteinerCoefficients in one dimension")
{
    SteinerCoefficients co(1);
    CHECK(co.C.n == 1);
    CHECK(co.B(0, 0) == 1.0);
    CHECK_THAT(co.omega[1], WithinRel(2.0, 1e-15));
}
