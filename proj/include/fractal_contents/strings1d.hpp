#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fractal_contents {

using cplx = std::complex<double>;

namespace detail {
inline cplx real_pow(double x, cplx s) { return std::exp(s * std::log(x)); }
} // namespace detail

/**
 * Lengths of the bounded gaps of a compact subset of the line, grouped into
 * distinct values l~_1 > l~_2 > ... with multiplicities w_m.
 *
 * Either an explicit finite list or a geometric rule l~_m = r^m, w_m = b^{m-1}
 * (Cantor: r = 1/3, b = 2; SVC(a): r = 1/a, b = 2). Rule strings keep the
 * inverse ratio when it is an integer so that l~_m = 1/q^m is exact.
 */
class FractalString {
public:
    enum class Rule { explicit_list, cantor, svc, geometric };

    static FractalString cantor()
    {
        FractalString s;
        s.rule_ = Rule::cantor;
        s.set_ratio(1.0 / 3.0, 3.0);
        s.branch_ = 2.0;
        return s;
    }

    static FractalString svc(double a)
    {
        if (!(a > 3.0)) throw std::domain_error("svc string needs a > 3");
        FractalString s;
        s.rule_ = Rule::svc;
        s.set_ratio(1.0 / a, a);
        s.branch_ = 2.0;
        s.param_ = a;
        return s;
    }

    /** l~_m = ratio^m with multiplicity mult^{m-1}. */
    static FractalString geometric(double ratio, double mult)
    {
        if (!(ratio > 0.0 && ratio < 1.0)) throw std::domain_error("geometric string needs ratio in (0,1)");
        if (!(mult >= 1.0) || mult != std::floor(mult))
            throw std::domain_error("geometric string needs an integer multiplicity >= 1");
        FractalString s;
        s.rule_ = Rule::geometric;
        double inv = 1.0 / ratio;
        double q = std::round(inv);
        if (std::abs(inv - q) < 1e-12 * inv)
            s.set_ratio(1.0 / q, q);
        else
            s.set_ratio(ratio, 0.0);
        s.branch_ = mult;
        return s;
    }

    static FractalString explicit_lengths(std::vector<double> lengths)
    {
        if (lengths.empty()) throw std::domain_error("explicit string needs at least one length");
        for (double l : lengths)
            if (!(l > 0.0) || !std::isfinite(l)) throw std::domain_error("string lengths must be positive and finite");
        std::sort(lengths.begin(), lengths.end(), std::greater<>());
        FractalString s;
        s.rule_ = Rule::explicit_list;
        for (double l : lengths) {
            if (!s.values_.empty() && s.values_.back() == l)
                s.mults_.back() += 1.0;
            else {
                s.values_.push_back(l);
                s.mults_.push_back(1.0);
            }
        }
        return s;
    }

    Rule rule() const { return rule_; }
    bool is_finite() const { return rule_ == Rule::explicit_list; }
    double ratio() const { return ratio_; }
    double branching() const { return branch_; }
    double svc_parameter() const { return param_; }

    /** Number of distinct lengths, or the deepest level representable in double for rules. */
    std::size_t level_count() const
    {
        if (is_finite()) return values_.size();
        return max_level_;
    }

    /** l~_m, m >= 1. */
    double length(std::size_t m) const
    {
        if (is_finite()) return values_.at(m - 1);
        if (inv_ > 0.0) return 1.0 / std::pow(inv_, static_cast<double>(m));
        return std::pow(ratio_, static_cast<double>(m));
    }

    double multiplicity(std::size_t m) const
    {
        if (is_finite()) return mults_.at(m - 1);
        return std::pow(branch_, static_cast<double>(m) - 1.0);
    }

    /** 1/l~_m, computed without rounding for integer inverse ratios. */
    double inverse_length(std::size_t m) const
    {
        if (!is_finite() && inv_ > 0.0) return std::pow(inv_, static_cast<double>(m));
        return 1.0 / length(m);
    }

    /** Abscissa of convergence of sum w l^s; finite strings report 0 since the Mellin form needs Re s > 0. */
    double abscissa() const
    {
        if (is_finite()) return 0.0;
        return std::log(branch_) / std::log(1.0 / ratio_);
    }

    double total_length() const
    {
        if (is_finite()) {
            double s = 0.0;
            for (std::size_t m = values_.size(); m-- > 0;) s += mults_[m] * values_[m];
            return s;
        }
        if (branch_ * ratio_ >= 1.0) return std::numeric_limits<double>::infinity();
        return tail_length_sum(1);
    }

    /** First level m (1-based) with l~_m < y; level_count()+1 when none. */
    std::size_t first_level_below(double y) const
    {
        if (is_finite()) {
            std::size_t m = 1;
            while (m <= values_.size() && values_[m - 1] >= y) ++m;
            return m;
        }
        if (!(y > 0.0)) throw truncation_error("string rule: infinitely many lengths at or above a nonpositive bound");
        // initial guess from logarithms, then correct against the stored values
        double g = std::floor(std::log(y) / std::log(ratio_));
        std::size_t m = g < 1.0 ? 1 : static_cast<std::size_t>(g);
        while (m > 1 && length(m - 1) < y) --m;
        while (m <= max_level_ && length(m) >= y) ++m;
        if (m > max_level_) throw truncation_error("string rule: lengths below the requested bound underflow");
        return m;
    }

    /** #{j : l_j > y} with multiplicity. */
    double count_greater(double y) const
    {
        if (is_finite()) {
            double c = 0.0;
            for (std::size_t m = 0; m < values_.size() && values_[m] > y; ++m) c += mults_[m];
            return c;
        }
        std::size_t K = first_level_below(y);
        std::size_t n = K - 1;
        if (n >= 1 && !(length(n) > y)) --n; // length(n) == y
        return cumulative(n);
    }

    /** #{j : l_j >= y} with multiplicity. */
    double count_at_least(double y) const { return cumulative(first_level_below(y) - 1); }

    /** Multiplicity of y as a length (0 when y is not a length). */
    double multiplicity_of(double y) const { return count_at_least(y) - count_greater(y); }

    /** Geometric counting function N_L(x) = #{j : 1/l_j <= x}. */
    double counting_function(double x) const
    {
        if (!(x > 0.0)) throw std::domain_error("counting_function needs x > 0");
        if (is_finite()) {
            double c = 0.0;
            for (std::size_t m = 0; m < values_.size() && 1.0 / values_[m] <= x; ++m) c += mults_[m];
            return c;
        }
        std::size_t m = 0;
        while (m + 1 <= max_level_ && inverse_length(m + 1) <= x) ++m;
        if (m == max_level_) throw truncation_error("counting_function: count unbounded at this x");
        return cumulative(m);
    }

    /** W_m = w_1 + ... + w_m; W_0 = 0. */
    double cumulative(std::size_t m) const
    {
        double c = 0.0;
        for (std::size_t k = 1; k <= m; ++k) c += multiplicity(k);
        return c;
    }

    /** sum_{m >= K} w_m l~_m, closed form for rules. */
    double tail_length_sum(std::size_t K) const
    {
        if (is_finite()) {
            double s = 0.0;
            for (std::size_t m = values_.size(); m >= K && m >= 1; --m) s += mults_[m - 1] * values_[m - 1];
            return s;
        }
        double q = branch_ * ratio_;
        if (q >= 1.0) throw truncation_error("string rule: divergent total length");
        return multiplicity(K) * length(K) / (1.0 - q);
    }

    /** sum_{m >= K} w_m l~_m^s. */
    cplx tail_zeta(std::size_t K, cplx s) const
    {
        if (is_finite()) {
            cplx z = 0.0;
            for (std::size_t m = values_.size(); m >= K && m >= 1; --m)
                z += mults_[m - 1] * detail::real_pow(values_[m - 1], s);
            return z;
        }
        cplx q = branch_ * detail::real_pow(ratio_, s);
        if (std::abs(q) >= 1.0) throw divergence_error("string zeta: tail diverges at this s");
        return multiplicity(K) * detail::real_pow(length(K), s) / (1.0 - q);
    }

private:
    void set_ratio(double r, double q)
    {
        ratio_ = r;
        inv_ = q;
        // deepest level whose length is a normal double with headroom for halving
        max_level_ = static_cast<std::size_t>(std::floor(std::log(DBL_MIN * 4.0) / std::log(r)));
    }

    Rule rule_ = Rule::explicit_list;
    std::vector<double> values_;
    std::vector<double> mults_;
    double ratio_ = 0.0;
    double inv_ = 0.0;
    double branch_ = 1.0;
    double param_ = 0.0;
    std::size_t max_level_ = 0;
};

/** beta_0(t) = 1 + #{j : l_j > 2t}, the two endpoints of the hull carrying mass 1/2 each. */
inline double beta0_string(const FractalString& s, double t)
{
    if (!(t > 0.0)) throw std::domain_error("beta0 needs t > 0");
    return 1.0 + s.count_greater(2.0 * t);
}

/** Same value through 1 + N_L(1/(2t)) - w(2t); throws when the two routes differ. */
inline double beta0_from_string(const FractalString& s, double t)
{
    double a = beta0_string(s, t);
    double b = 1.0 + s.count_at_least(2.0 * t) - s.multiplicity_of(2.0 * t);
    if (a != b) throw consistency_error("beta0_from_string: count forms disagree");
    return a;
}

struct TubeVolume1d {
    double steiner = 0.0;
    double direct = 0.0;
};

namespace detail {

// Number of breakpoint levels below eps handled piecewise before the closed tail.
inline constexpr std::size_t steiner_piecewise_depth = 40;

} // namespace detail

/** int_0^eps beta_0, summed interval by interval over the breakpoints l~_m / 2. */
inline double integral_beta0(const FractalString& s, double eps)
{
    std::size_t K = s.first_level_below(2.0 * eps);
    std::size_t Kd;
    double tail;
    std::vector<double> W; // W[m] for m = 0..Kd-1
    if (s.is_finite()) {
        Kd = s.level_count() + 1;
        tail = 0.0;
    } else {
        Kd = std::min(K + detail::steiner_piecewise_depth, s.level_count());
        tail = 0.0;
    }
    W.resize(Kd);
    W[0] = 0.0;
    for (std::size_t m = 1; m < Kd; ++m) W[m] = W[m - 1] + s.multiplicity(m);
    if (!s.is_finite()) {
        double b = s.length(Kd) / 2.0;
        tail = b * (1.0 + W[Kd - 1]) + 0.5 * s.tail_length_sum(Kd);
    }
    double acc = tail;
    for (std::size_t m = Kd - 1; m >= K && m >= 1; --m) {
        double hi = s.length(m) / 2.0;
        double lo = (m + 1 <= s.level_count()) ? s.length(m + 1) / 2.0 : 0.0;
        acc += (hi - lo) * (1.0 + W[m]);
    }
    double bK = (K <= s.level_count()) ? s.length(K) / 2.0 : 0.0;
    acc += (eps - bK) * (1.0 + W[K - 1]);
    return acc;
}

inline TubeVolume1d tube_volume_1d(const FractalString& s, double eps)
{
    if (!(eps > 0.0)) throw std::domain_error("tube_volume_1d needs eps > 0");
    TubeVolume1d v;
    v.steiner = 2.0 * integral_beta0(s, eps);
    std::size_t K = s.first_level_below(2.0 * eps);
    double below = (K <= s.level_count()) ? s.tail_length_sum(K) : 0.0;
    v.direct = 2.0 * eps + 2.0 * eps * s.count_at_least(2.0 * eps) + below;
    return v;
}

struct OneSided {
    double left = 0.0;
    double right = 0.0;
};

inline OneSided tube_derivatives(const FractalString& s, double eps)
{
    if (!(eps > 0.0)) throw std::domain_error("tube_derivatives needs eps > 0");
    return {2.0 + 2.0 * s.count_at_least(2.0 * eps), 2.0 * beta0_string(s, eps)};
}

struct ZetaTriple {
    cplx dirichlet;
    cplx mellin;
    cplx functional;
};

namespace detail {

inline std::size_t zeta_depth(const FractalString& s)
{
    return s.is_finite() ? s.level_count() : std::min<std::size_t>(60, s.level_count() - 1);
}

inline void check_abscissa(const FractalString& s, cplx z)
{
    if (!(z.real() > s.abscissa()))
        throw divergence_error("geometric zeta: Re(s) must exceed the abscissa " + std::to_string(s.abscissa()));
}

} // namespace detail

inline cplx zeta_dirichlet(const FractalString& s, cplx z)
{
    detail::check_abscissa(s, z);
    std::size_t K = detail::zeta_depth(s);
    cplx acc = s.is_finite() ? cplx(0.0) : s.tail_zeta(K + 1, z);
    for (std::size_t m = K; m >= 1; --m) acc += s.multiplicity(m) * detail::real_pow(s.length(m), z);
    return acc;
}

/** s int_0^inf tau^{-s-1} N_L(tau) dtau over the steps [1/l~_m, 1/l~_{m+1}). */
inline cplx zeta_mellin(const FractalString& s, cplx z)
{
    detail::check_abscissa(s, z);
    std::size_t K = detail::zeta_depth(s);
    // ascending, so W_m stays exact while it fits in the mantissa
    cplx acc = 0.0;
    double W = 0.0;
    for (std::size_t m = 1; m <= K; ++m) {
        W += s.multiplicity(m);
        cplx next = (m + 1 <= K || !s.is_finite()) ? detail::real_pow(s.length(m + 1), z) : cplx(0.0);
        acc += W * (detail::real_pow(s.length(m), z) - next);
    }
    if (!s.is_finite()) acc += W * detail::real_pow(s.length(K + 1), z) + s.tail_zeta(K + 1, z);
    return acc;
}

/** -(2eps)^s + 2^s s int_0^eps t^{s-1} beta_0(t) dt, for eps >= l_1/2. */
inline cplx zeta_functional(const FractalString& s, cplx z, double eps)
{
    detail::check_abscissa(s, z);
    if (!(eps >= s.length(1) / 2.0)) throw std::domain_error("zeta_functional needs eps >= l_1/2");
    std::size_t K = detail::zeta_depth(s);
    // integral of t^{s-1} beta_0, without the 1/s factor
    cplx acc = 0.0;
    double W = 0.0;
    for (std::size_t m = 1; m <= K; ++m) {
        W += s.multiplicity(m);
        double hi = s.length(m) / 2.0;
        cplx lo = (m + 1 <= K || !s.is_finite()) ? detail::real_pow(s.length(m + 1) / 2.0, z) : cplx(0.0);
        acc += (1.0 + W) * (detail::real_pow(hi, z) - lo);
    }
    if (!s.is_finite()) {
        double b = s.length(K + 1) / 2.0;
        acc += (1.0 + W) * detail::real_pow(b, z) + s.tail_zeta(K + 1, z) * detail::real_pow(0.5, z);
    }
    acc += detail::real_pow(eps, z) - detail::real_pow(s.length(1) / 2.0, z);
    return -detail::real_pow(2.0 * eps, z) + detail::real_pow(2.0, z) * acc;
}

inline ZetaTriple geometric_zeta(const FractalString& s, cplx z, double eps)
{
    return {zeta_dirichlet(s, z), zeta_mellin(s, z), zeta_functional(s, z, eps)};
}

/** Partial sum |n| <= N of the Fourier tube formula of the ternary Cantor set. */
inline double cantor_tube_fourier(double eps, int N)
{
    if (!(eps > 0.0 && eps <= 1.0 / 6.0)) throw std::domain_error("cantor_tube_fourier needs eps in (0, 1/6]");
    if (N < 0) throw std::domain_error("cantor_tube_fourier needs N >= 0");
    const double D = std::log(2.0) / std::log(3.0);
    const double p = 2.0 * std::numbers::pi / std::log(3.0);
    const double x = 2.0 * eps;
    const double lx = std::log(x);
    double sum = 1.0 / (D * (1.0 - D));
    for (int n = N; n >= 1; --n) {
        cplx ip(0.0, n * p);
        cplx term = std::exp(ip * lx) / ((D - ip) * (1.0 - D + ip));
        sum += 2.0 * term.real();
    }
    return std::pow(x, 1.0 - D) / (2.0 * std::log(3.0)) * sum;
}

/** Smallest N whose O(1/n^2) tail bound falls below tol at this eps. */
inline int cantor_fourier_terms(double eps, double tol)
{
    const double D = std::log(2.0) / std::log(3.0);
    const double p = 2.0 * std::numbers::pi / std::log(3.0);
    double c = std::pow(2.0 * eps, 1.0 - D) / std::log(3.0) / (p * p);
    // sum_{n > N} c / n^2 < c / N
    return static_cast<int>(std::ceil(c / tol));
}

} // namespace fractal_contents
