#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "raster2d.hpp"
#include "set_models.hpp"
#include "steiner_algebra.hpp"
#include "strings1d.hpp"

namespace fractal_contents {

// ---------------------------------------------------------------------------
// Integrals of basic functions
// ---------------------------------------------------------------------------

namespace detail {

inline cplx power_integral(double lo, double hi, cplx p)
{
    // int_lo^hi t^{p-1} dt
    cplx a = cpow(hi, p);
    if (lo > 0.0) a -= cpow(lo, p);
    return a / p;
}

// int_lo^hi t^c (a + b t) dt
inline cplx affine_piece(double lo, double hi, double a, double b, cplx c)
{
    cplx r = 0.0;
    if (a != 0.0) r += a * power_integral(lo, hi, c + 1.0);
    if (b != 0.0) r += b * power_integral(lo, hi, c + 2.0);
    return r;
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> gk_x = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                                               0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                                               0.207784955007898468, 0.0};
inline constexpr std::array<double, 8> gk_wk = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                                                0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                                                0.204432940075298892, 0.209482141084727828};
inline constexpr std::array<double, 4> gk_wg = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                                                0.417959183673469388};

template <class F>
cplx gk15(const F& f, double a, double b, cplx& err)
{
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx fc = f(c);
    cplx k = gk_wk[7] * fc, g = gk_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        cplx f1 = f(c - h * gk_x[j]), f2 = f(c + h * gk_x[j]);
        k += gk_wk[j] * (f1 + f2);
        if (j % 2 == 1) g += gk_wg[j / 2] * (f1 + f2);
    }
    err = (k - g) * h;
    return k * h;
}

template <class F>
cplx adaptive_gk(const F& f, double a, double b, double tol, int depth = 0)
{
    cplx err;
    cplx v = gk15(f, a, b, err);
    if (std::abs(err) <= tol || depth > 40 || b - a <= 1e-15 * std::max(std::abs(a), std::abs(b))) return v;
    double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, tol / 2.0, depth + 1) + adaptive_gk(f, m, b, tol / 2.0, depth + 1);
}

struct Panel {
    double lo;
    double hi;
};

inline std::vector<Panel> panels_below(const BasicFunctionProfile& pr, double eps, double& bottom)
{
    std::vector<double> b;
    for (double x : pr.breakpoints)
        if (x < eps) b.push_back(x);
    std::vector<Panel> out;
    double hi = eps;
    for (auto it = b.rbegin(); it != b.rend(); ++it) {
        out.push_back({*it, hi});
        hi = *it;
    }
    bottom = hi; // (0, bottom] remains
    return out;
}

inline void check_zeta_domain(const BasicFunctionProfile& pr, cplx s, double eps)
{
    if (!(eps > 0.0)) throw std::domain_error("basic_zeta needs eps > 0");
    if (eps > pr.t_max * (1.0 + 1e-12)) throw std::domain_error("basic_zeta: eps exceeds the profile range");
    if (pr.exponent > -std::numeric_limits<double>::infinity() && !(s.real() > pr.exponent))
        throw divergence_error("basic_zeta: Re(s) must exceed the basic exponent " + std::to_string(pr.exponent));
    if (pr.tail && !(pr.breakpoints.front() < eps))
        throw std::domain_error("basic_zeta: profile does not resolve scales below eps");
}

} // namespace detail

/** int_0^eps t^{s-i-1} beta_i(t) dt, piece by piece with exact affine integrals. */
inline cplx basic_zeta(const BasicFunctionProfile& pr, cplx s, double eps)
{
    detail::check_zeta_domain(pr, s, eps);
    if (!pr.affine_pieces) throw std::domain_error("basic_zeta: profile is not piecewise affine; use basic_zeta_quadrature");
    cplx c = s - static_cast<double>(pr.index) - 1.0;
    double bottom = 0.0;
    auto panels = detail::panels_below(pr, eps, bottom);
    cplx acc = 0.0;
    auto piece = [&](double lo, double hi) {
        double t1 = lo + (hi - lo) / 3.0, t2 = lo + 2.0 * (hi - lo) / 3.0;
        double f1 = pr.evaluate(t1), f2 = pr.evaluate(t2);
        double b = (f2 - f1) / (t2 - t1);
        double a = f1 - b * t1;
        if (f1 == f2) {
            a = f1;
            b = 0.0;
        }
        return detail::affine_piece(lo, hi, a, b, c);
    };
    if (pr.tail)
        acc = pr.tail(s);
    else
        acc = piece(0.0, bottom);
    for (auto it = panels.rbegin(); it != panels.rend(); ++it) acc += piece(it->lo, it->hi);
    return acc;
}

/** Same integral by adaptive Gauss-Kronrod on every panel; shares the closed tail when there is one. */
inline cplx basic_zeta_quadrature(const BasicFunctionProfile& pr, cplx s, double eps, double tol = 1e-14)
{
    detail::check_zeta_domain(pr, s, eps);
    cplx c = s - static_cast<double>(pr.index) - 1.0;
    double bottom = 0.0;
    auto panels = detail::panels_below(pr, eps, bottom);
    cplx acc = 0.0;
    if (pr.tail)
        acc = pr.tail(s);
    else if (bottom > 0.0) {
        // t = bottom e^{-x}
        cplx cp1 = c + 1.0;
        double X = std::min(45.0 / cp1.real(), 700.0);
        auto g = [&](double x) {
            double t = bottom * std::exp(-x);
            return detail::cpow(bottom, cp1) * std::exp(-x * cp1) * pr.evaluate(t);
        };
        double scale = std::abs(detail::cpow(bottom, cp1)) * std::max(1.0, std::abs(pr.evaluate(bottom / 2.0)));
        acc = detail::adaptive_gk(g, 0.0, X, tol * scale);
    }
    for (auto it = panels.rbegin(); it != panels.rend(); ++it) {
        auto f = [&](double t) { return detail::cpow(t, c) * pr.evaluate(t); };
        double scale = std::abs(detail::cpow(it->hi, c)) * std::max(1.0, std::abs(pr.evaluate(it->hi))) * (it->hi - it->lo);
        acc += detail::adaptive_gk(f, it->lo, it->hi, tol * std::max(scale, 1e-300));
    }
    return acc;
}

inline cplx basic_zeta_any(const BasicFunctionProfile& pr, cplx s, double eps)
{
    return pr.affine_pieces ? basic_zeta(pr, s, eps) : basic_zeta_quadrature(pr, s, eps);
}

/** zeta_A(s; eps) = sum_i omega_{d-i} zeta_i(s; eps). */
inline cplx distance_zeta_from_basic(const std::vector<BasicFunctionProfile>& profiles, cplx s, double eps)
{
    if (profiles.empty()) return 0.0;
    int d = profiles.front().dim;
    auto u = unit_ball_constants(d);
    cplx acc = 0.0;
    for (auto& p : profiles) acc += u.omega[d - p.index] * basic_zeta_any(p, s, eps);
    return acc;
}

inline std::vector<BasicFunctionProfile> model_profiles(const SetModel& m, double t_max, double t_min = 0.0)
{
    std::vector<BasicFunctionProfile> out;
    for (int i = 0; i < m.dim(); ++i) out.push_back(make_profile(m, i, t_max, t_min));
    return out;
}

/** V(A_eps \ A) assembled from the basic functions. */
inline double steiner_tube_volume(const SetModel& m, double eps)
{
    auto prof = model_profiles(m, eps, eps * 1e-12);
    return distance_zeta_from_basic(prof, cplx(m.dim(), 0.0), eps).real();
}

// ---------------------------------------------------------------------------
// Support masses
// ---------------------------------------------------------------------------

/** mu_i(A_eps) = sum_{j <= i} c_ij eps^{i-j} beta_j(eps). */
inline std::vector<double> support_masses(const std::vector<double>& beta_at_eps, const SteinerCoefficients& co, double eps)
{
    int d = co.dim;
    if (static_cast<int>(beta_at_eps.size()) != d) throw std::domain_error("support_masses: need one beta per index");
    std::vector<double> mu(d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) mu[i] += co.C(i, j) * std::pow(eps, i - j) * beta_at_eps[j];
    return mu;
}

inline std::vector<double> support_masses(const std::vector<BasicFunctionProfile>& profiles, const SteinerCoefficients& co, double eps)
{
    std::vector<double> b;
    for (auto& p : profiles) b.push_back(p.evaluate(eps));
    return support_masses(b, co, eps);
}

/** beta_i(eps) = sum_{j <= i} b_ij eps^{i-j} mu_j(A_eps). */
inline std::vector<double> basic_from_support(const std::vector<double>& mu, const SteinerCoefficients& co, double eps)
{
    int d = co.dim;
    if (static_cast<int>(mu.size()) != d) throw std::domain_error("basic_from_support: need one mass per index");
    std::vector<double> b(d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) b[i] += co.B(i, j) * std::pow(eps, i - j) * mu[j];
    return b;
}

struct VariationBoundEntry {
    int index = 0;
    double total_variation = 0.0; // |mu_i|(A_eps)
    double bound = 0.0;           // 2 sum_j c_ij eps^{i-j} beta_j^var(eps)
    double margin = 0.0;
    bool holds = true;
};

struct VariationBoundReport {
    bool computable = false;
    std::vector<VariationBoundEntry> entries;
    bool holds() const
    {
        for (auto& e : entries)
            if (!e.holds) return false;
        return true;
    }
};

/** |mu_i|(A_eps) for models whose parallel sets have an elementary curvature structure. */
inline std::optional<std::vector<double>> support_variation(const SetModel& m, double eps)
{
    const double pi = std::numbers::pi;
    const double s = m.scale();
    const auto& p = m.params();
    switch (m.kind()) {
    case ModelKind::disc: return std::vector<double>{1.0, pi * (p[0] + eps)};
    case ModelKind::circle: {
        double R = p[0];
        if (eps < R) return std::vector<double>{2.0, 2.0 * pi * R};
        return std::vector<double>{1.0, pi * (R + eps)};
    }
    case ModelKind::square_boundary: {
        double a = p[0];
        double outer = (4.0 * a + 2.0 * pi * eps) / 2.0;
        if (eps < a / 2.0) return std::vector<double>{2.0, outer + 2.0 * (a - 2.0 * eps)};
        return std::vector<double>{1.0, outer};
    }
    case ModelKind::parallel_segments: {
        double l = p[0], g = p[1];
        if (eps < g / 2.0) return std::vector<double>{2.0, 2.0 * l + 2.0 * pi * eps};
        return std::nullopt;
    }
    case ModelKind::cantor_ternary:
    case ModelKind::svc:
    case ModelKind::string_set:
        // components of A_eps, two endpoints of mass 1/2 each
        return std::vector<double>{beta(m, 0, eps)};
    default: (void)s; return std::nullopt;
    }
}

inline VariationBoundReport variation_bound_check(const SetModel& m, const SteinerCoefficients& co, double eps)
{
    VariationBoundReport rep;
    auto tv = support_variation(m, eps);
    if (!tv) return rep;
    rep.computable = true;
    int d = co.dim;
    for (int i = 0; i < d; ++i) {
        VariationBoundEntry e;
        e.index = i;
        e.total_variation = (*tv)[i];
        for (int j = 0; j <= i; ++j) e.bound += co.C(i, j) * std::pow(eps, i - j) * beta_var(m, j, eps);
        e.bound *= 2.0;
        e.margin = e.bound - e.total_variation;
        e.holds = e.margin >= -1e-12 * std::max(1.0, e.bound);
        rep.entries.push_back(e);
    }
    return rep;
}

/** Outer Minkowski content (1/(d-q)) sum_j omega_{d-j} M_j^q. */
inline double minkowski_content_from_basic(const std::vector<double>& contents, double q, const SteinerCoefficients& co)
{
    int d = co.dim;
    if (!(q < d)) throw std::domain_error("minkowski_content_from_basic needs q < d");
    if (static_cast<int>(contents.size()) != d) throw std::domain_error("minkowski_content_from_basic: need one content per index");
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += co.omega[d - j] * contents[j];
    return s / (d - q);
}

// ---------------------------------------------------------------------------
// Scaling fits
// ---------------------------------------------------------------------------

struct ScalingSamples {
    std::vector<double> t;      // strictly decreasing
    std::vector<double> values;
    std::vector<double> variation_values;
    std::vector<double> error_budget;
    int per_period = 1; // samples per lattice period; every per_period-th sample counted from the finest is lattice aligned
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // root mean square
    std::size_t n = 0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    LineFit f;
    f.n = x.size();
    if (x.size() < 2) return f;
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double r = y[k] - (f.intercept + f.slope * x[k]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / x.size());
    return f;
}

enum class FitMethod { differences, limit, decay, constant, zero };

inline const char* fit_method_name(FitMethod m)
{
    switch (m) {
    case FitMethod::differences: return "differences";
    case FitMethod::limit: return "limit";
    case FitMethod::decay: return "decay";
    case FitMethod::constant: return "constant";
    case FitMethod::zero: return "zero";
    }
    return "?";
}

struct ScalingReport {
    int index = 0;
    double exponent = 0.0;
    double lower_exponent = 0.0;
    double upper_exponent = 0.0;
    double lower_content = 0.0;
    double upper_content = 0.0;
    // limit of t^{q-i} f when the sequence visibly converges, else the envelope midpoint
    double content = 0.0;
    LineFit fit; // log|f| against -log t on the finest half of the range
    FitMethod method = FitMethod::differences;
    bool oscillation_flag = false;
    bool sign_change = false;
    bool low_confidence = false;
    std::size_t samples = 0;
    double decades = 0.0;
};

namespace detail {

inline double rel_spread(const std::vector<double>& v)
{
    if (v.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    if (mean == 0.0) return 0.0;
    return (*hi - *lo) / std::abs(mean);
}

} // namespace detail

/**
 * Exponent of f(t) ~ t^{-(q-i)} as t -> 0, reported as q.
 *
 * The main estimate fits log|first differences| of the lattice-aligned
 * subsequence, which cancels additive constants. A sequence whose differences
 * shrink is extrapolated geometrically; a nonzero limit means exponent i.
 */
inline ScalingReport fit_exponent(const ScalingSamples& S, int i)
{
    const std::size_t n = S.t.size();
    if (n != S.values.size()) throw std::domain_error("fit_exponent: abscissae and values differ in length");
    if (n < 2) throw std::domain_error("fit_exponent: need at least two samples");
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (!(S.t[k] > S.t[k + 1]) || !(S.t[k + 1] > 0.0)) throw std::domain_error("fit_exponent: abscissae must be positive and strictly decreasing");
    for (double v : S.values)
        if (!std::isfinite(v)) throw std::domain_error("fit_exponent: values must be finite");

    ScalingReport R;
    R.index = i;
    R.samples = n;
    R.decades = std::log10(S.t.front() / S.t.back());
    R.low_confidence = n < 8 || R.decades < 3.0;
    const int M = std::max(1, S.per_period);

    std::vector<double> x(n), v(n);
    bool pos = false, neg = false;
    double vmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = -std::log(S.t[k]);
        v[k] = std::abs(S.values[k]);
        pos |= S.values[k] > 0.0;
        neg |= S.values[k] < 0.0;
        vmax = std::max(vmax, v[k]);
    }
    R.sign_change = pos && neg;

    // plain regression over the finest half of the log range
    {
        double xmid = 0.5 * (x.front() + x.back());
        std::vector<double> fx, fy;
        for (std::size_t k = 0; k < n; ++k)
            if (x[k] >= xmid && v[k] > 0.0) {
                fx.push_back(x[k]);
                fy.push_back(std::log(v[k]));
            }
        R.fit = least_squares(fx, fy);
    }

    if (vmax == 0.0) {
        R.method = FitMethod::zero;
        R.exponent = R.lower_exponent = R.upper_exponent = -std::numeric_limits<double>::infinity();
        return R;
    }

    // lattice subsequence, coarse to fine
    std::vector<std::size_t> L;
    for (std::size_t k = n; k-- > 0;) {
        if ((n - 1 - k) % M == 0) L.push_back(k);
    }
    std::reverse(L.begin(), L.end());
    const std::size_t nl = L.size();
    const double rho = nl >= 2 ? std::exp(-(x[L.back()] - x[L.front()]) / (nl - 1)) : 0.5;

    // finest half of the lattice samples, at least three of them
    std::size_t first = nl >= 6 ? nl / 2 : 0;
    std::vector<double> dx, dy, dv;
    for (std::size_t k = std::max<std::size_t>(first, 1); k < nl; ++k) {
        double d = v[L[k]] - v[L[k - 1]];
        dv.push_back(d);
        if (d != 0.0) {
            dx.push_back(x[L[k]]);
            dy.push_back(std::log(std::abs(d)));
        }
    }

    double q = static_cast<double>(i);
    std::vector<double> series_x, series_y; // used for the windowed slopes
    bool all_flat = true;
    for (double d : dv)
        if (std::abs(d) > 1e-14 * vmax) all_flat = false;

    if (all_flat || dy.size() < 2) {
        R.method = FitMethod::constant;
        q = i;
        R.lower_exponent = R.upper_exponent = q;
        R.content = v[n - 1];
    } else {
        LineFit df = least_squares(dx, dy);
        double sd = df.slope;
        if (sd > 1e-9) {
            R.method = FitMethod::differences;
            q = i + sd;
            series_x = dx;
            series_y = dy;
        } else {
            double ratio = std::exp(-sd * std::log(rho)); // |Delta_{k+1} / Delta_k| < 1
            ratio = std::min(ratio, 1.0 - 1e-12);
            double dlast = dv.back();
            double limit = v[L.back()] + dlast * ratio / (1.0 - ratio);
            if (std::abs(limit) > 1e-6 * vmax) {
                R.method = FitMethod::limit;
                q = i;
                R.content = limit;
                R.lower_exponent = R.upper_exponent = q;
            } else {
                R.method = FitMethod::decay;
                q = i + sd;
                series_x = dx;
                series_y = dy;
            }
        }
    }
    R.exponent = q;

    // windowed secant slopes on the finest three decades, windows of about one decade
    if (!series_x.empty()) {
        int w = std::max(1, static_cast<int>(std::lround(std::log(10.0) / -std::log(rho))));
        double xfine = series_x.back();
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t a = 0; a + w < series_x.size(); ++a) {
            if (xfine - series_x[a] > 3.0 * std::log(10.0) + 1e-9) continue;
            double s = (series_y[a + w] - series_y[a]) / (series_x[a + w] - series_x[a]);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        if (lo > hi) lo = hi = q - i;
        R.lower_exponent = std::min(i + lo, q);
        R.upper_exponent = std::max(i + hi, q);
    }

    // envelope of t^{q-i} f over the finest decade, all samples and lattice samples
    std::vector<double> comp, comp_lattice;
    double tfine = S.t.back();
    for (std::size_t k = 0; k < n; ++k) {
        if (S.t[k] > 10.0 * tfine * (1.0 + 1e-12)) continue;
        double c = std::pow(S.t[k], q - i) * v[k];
        comp.push_back(c);
        if ((n - 1 - k) % M == 0) comp_lattice.push_back(c);
    }
    if (!comp.empty()) {
        auto [lo, hi] = std::minmax_element(comp.begin(), comp.end());
        R.lower_content = *lo;
        R.upper_content = *hi;
        if (R.method != FitMethod::limit && R.method != FitMethod::constant) R.content = 0.5 * (*lo + *hi);
        // an extrapolated limit may sit outside the observed range
        R.lower_content = std::min(R.lower_content, R.content);
        R.upper_content = std::max(R.upper_content, R.content);
    }
    R.oscillation_flag = detail::rel_spread(comp) > 3.0 * detail::rel_spread(comp_lattice) + 1e-9;
    return R;
}

// ---------------------------------------------------------------------------
// Sampling helpers
// ---------------------------------------------------------------------------

struct SamplingPlan {
    double t_top = 0.5;
    double ratio = 0.8; // lattice ratio, t shrinks by this per period
    int per_period = 1;
    int periods = 20;
    double t_floor = 0.0; // stop above this scale
    // sample step functions through their jump midpoints; for event thresholds
    // that are not geometric, where lattice samples would see floor noise
    bool smooth_steps = false;
};

/** t_k = t_top ratio^{k / per_period}; lattice points are t_top / q^j when 1/ratio is an integer q. */
inline std::vector<double> sample_scales(const SamplingPlan& P)
{
    if (!(P.ratio > 0.0 && P.ratio < 1.0)) throw std::domain_error("sampling ratio must lie in (0,1)");
    if (P.per_period < 1 || P.periods < 0) throw std::domain_error("sampling counts must be positive");
    double inv = 1.0 / P.ratio;
    double qi = std::round(inv);
    bool integral = std::abs(inv - qi) < 1e-12 * inv;
    std::vector<double> t;
    for (int j = 0; j <= P.periods; ++j) {
        for (int r = 0; r < P.per_period; ++r) {
            if (j == P.periods && r > 0) break;
            double base = integral ? P.t_top / std::pow(qi, j) : P.t_top * std::pow(P.ratio, j);
            double v = r == 0 ? base : base * std::pow(P.ratio, static_cast<double>(r) / P.per_period);
            if (v < P.t_floor) return t;
            t.push_back(v);
        }
    }
    return t;
}

/** Natural lattice of a model and a top scale sitting inside one period. */
inline SamplingPlan default_plan(const SetModel& m)
{
    SamplingPlan P;
    const auto& p = m.params();
    double s = m.scale();
    switch (m.kind()) {
    case ModelKind::sierpinski_gasket:
        P.ratio = 0.5;
        P.t_top = gasket_g * std::sqrt(0.5);
        P.periods = 16;
        break;
    case ModelKind::cantor_ternary:
        P.ratio = 1.0 / 3.0;
        P.t_top = 0.5 * std::pow(3.0, -0.5);
        P.periods = 12;
        break;
    case ModelKind::svc:
        P.ratio = 1.0 / p[0];
        P.t_top = 0.5 * std::pow(p[0], -0.5);
        P.periods = std::max(6, static_cast<int>(std::ceil(5.0 / std::log10(p[0]))));
        break;
    case ModelKind::string_set: {
        const FractalString& st = *m.string();
        if (!st.is_finite()) {
            P.ratio = st.ratio();
            P.t_top = st.length(1) / 2.0 * std::sqrt(st.ratio());
            P.periods = std::max(6, static_cast<int>(std::ceil(5.0 / std::log10(1.0 / st.ratio()))));
        } else {
            // the asymptotic regime starts below the smallest length
            P.t_top = st.length(st.level_count()) / 4.0;
            P.periods = 40;
        }
        break;
    }
    case ModelKind::fractal_window: {
        double r = p[0];
        double pp = (1.0 - 2.0 * r) / 3.0;
        P.ratio = r;
        P.t_top = pp / 2.0 * std::sqrt(r);
        P.periods = 1000;
        P.t_floor = m.events()->trusted_scale();
        break;
    }
    case ModelKind::enclosed_dust:
        P.smooth_steps = true;
        P.ratio = 0.8;
        P.t_top = 0.45;
        P.periods = 100000;
        P.t_floor = m.events()->trusted_scale();
        break;
    case ModelKind::disc: P.t_top = p[0] / 4.0; P.periods = 40; break;
    case ModelKind::circle: P.t_top = p[0] / 4.0; P.periods = 40; break;
    case ModelKind::square_boundary: P.t_top = p[0] / 8.0; P.periods = 40; break;
    case ModelKind::parallel_segments: P.t_top = p[1] / 4.0; P.periods = 40; break;
    }
    P.t_top *= s;
    P.t_floor *= s;
    return P;
}

inline ScalingSamples sample_basic(const SetModel& m, int i, const std::vector<double>& t, int per_period, bool var = true,
                                   bool smooth = false)
{
    ScalingSamples S;
    S.per_period = per_period;
    S.t = t;
    for (double x : t) {
        // event models carry nonnegative masses, so smoothing serves both variants
        if (smooth) S.values.push_back(beta_smoothed(m, i, x));
        else S.values.push_back(var ? beta_var(m, i, x) : beta(m, i, x));
        S.variation_values.push_back(beta_var(m, i, x));
        S.error_budget.push_back(0.0);
    }
    return S;
}

// ---------------------------------------------------------------------------
// Raster estimates
// ---------------------------------------------------------------------------

struct RasterDimensions {
    double box = 0.0;    // slope of log Theta_t against -log t
    double volume = 0.0; // 2 + slope of log V against -log t
    std::vector<double> t;
    std::vector<long long> theta;
    std::vector<double> volumes;
};

/** The raster stands for a null limit set by a filled prefractal, so parallel set areas replace V(A_t minus A). */
inline bool raster_fills_prefractal(const SetModel& m) { return m.kind() == ModelKind::sierpinski_gasket; }

/**
 * Dyadic t = 8h, 16h, ... while the footprint needs at least min_boxes boxes
 * and t + shell stays inside the padding.
 */
inline RasterDimensions raster_dimensions(const DistanceField& F, bool whole_parallel_set, long long min_boxes = 100)
{
    RasterDimensions R;
    const double h = F.h();
    std::vector<double> x, yb, yv;
    for (double t = 8.0 * h; t + 2.0 * h <= F.grid->pad * (1.0 + 1e-12); t *= 2.0) {
        auto fp = footprint_Mt(F, t);
        if (fp.cells.empty()) break;
        long long theta = covering_count(*F.grid, fp, t);
        if (theta < min_boxes) break;
        double v = whole_parallel_set ? parallel_set_area(F, t) : parallel_volume(F, t);
        R.t.push_back(t);
        R.theta.push_back(theta);
        R.volumes.push_back(v);
        x.push_back(-std::log(t));
        yb.push_back(std::log(static_cast<double>(theta)));
        yv.push_back(std::log(v));
    }
    if (x.size() < 3) throw resolution_error("raster_dimensions: fewer than three usable scales; refine h or enlarge pad");
    R.box = least_squares(x, yb).slope;
    R.volume = 2.0 + least_squares(x, yv).slope;
    return R;
}

// ---------------------------------------------------------------------------
// Dimension report for a model
// ---------------------------------------------------------------------------

struct DimensionReport {
    std::string model;
    int dim = 2;
    std::vector<ScalingReport> basic;   // m_i from beta_i^var
    std::vector<ScalingReport> support; // s_i from |mu_i(A_eps)|
    ScalingReport volume;               // outer Minkowski dimension from V(A_eps \ A)
    double dim_minkowski = 0.0;
    double max_basic = 0.0;
    std::optional<double> dim_box;      // from raster covering counts when computed
    std::optional<double> dim_raster_volume;
    double minkowski_content_assembled = 0.0;
    std::vector<double> t;
    std::vector<std::vector<double>> beta_samples;
    std::vector<std::vector<double>> mu_samples;
    std::vector<double> volume_samples;
    std::vector<std::string> discrepancies;
    double tolerance = 0.05;
};

inline void check_dimension_consistency(DimensionReport& R)
{
    R.discrepancies.clear();
    auto flag = [&](const std::string& what, double a, double b) {
        if (std::isfinite(a) && std::isfinite(b) && std::abs(a - b) > R.tolerance)
            R.discrepancies.push_back(what + ": " + std::to_string(a) + " vs " + std::to_string(b));
    };
    flag("max basic exponent vs volume dimension", R.max_basic, R.dim_minkowski);
    if (!R.support.empty()) flag("top support exponent vs volume dimension", R.support.back().exponent, R.dim_minkowski);
    if (R.dim_box) flag("box dimension vs volume dimension", *R.dim_box, R.dim_minkowski);
    if (R.dim_raster_volume) flag("raster volume dimension vs volume dimension", *R.dim_raster_volume, R.dim_minkowski);
    for (auto& b : R.basic)
        if (b.method != FitMethod::zero && b.exponent < b.index - R.tolerance)
            R.discrepancies.push_back("basic exponent below its index at i=" + std::to_string(b.index));
    if (R.support.size() >= 2 && R.support[0].exponent > R.support[1].exponent + R.tolerance)
        R.discrepancies.push_back("support exponents decrease from index 0 to 1");
    if (!R.support.empty() && !R.basic.empty() && R.support[0].method != FitMethod::zero && R.basic[0].method != FitMethod::zero &&
        std::abs(R.support[0].exponent - R.basic[0].exponent) > R.tolerance)
        R.discrepancies.push_back("s_0 differs from m_0");
}

inline DimensionReport dimension_report(const SetModel& m, std::optional<SamplingPlan> plan = std::nullopt)
{
    SamplingPlan P = plan ? *plan : default_plan(m);
    DimensionReport R;
    R.model = model_kind_name(m.kind());
    R.dim = m.dim();
    R.t = sample_scales(P);
    if (R.t.size() < 2) throw std::domain_error("dimension_report: sampling plan yields fewer than two scales");
    SteinerCoefficients co(m.dim());
    const int d = m.dim();
    R.beta_samples.assign(d, {});
    R.mu_samples.assign(d, {});
    for (double t : R.t) {
        std::vector<double> b(d);
        for (int i = 0; i < d; ++i) {
            b[i] = beta(m, i, t);
            R.beta_samples[i].push_back(b[i]);
        }
        auto mu = support_masses(b, co, t);
        for (int i = 0; i < d; ++i) R.mu_samples[i].push_back(mu[i]);
        auto ex = exact_tube_volume(m, t);
        R.volume_samples.push_back(ex ? *ex : steiner_tube_volume(m, t));
    }
    R.max_basic = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
        R.basic.push_back(fit_exponent(sample_basic(m, i, R.t, P.per_period, true, P.smooth_steps), i));
        R.max_basic = std::max(R.max_basic, R.basic.back().exponent);
        ScalingSamples S;
        S.per_period = P.per_period;
        S.t = R.t;
        S.values = R.mu_samples[i];
        R.support.push_back(fit_exponent(S, i));
    }
    ScalingSamples V;
    V.per_period = P.per_period;
    V.t = R.t;
    V.values = R.volume_samples;
    R.volume = fit_exponent(V, d);
    R.dim_minkowski = R.volume.exponent;

    // assemble the outer Minkowski content at q = dimension from the basic contents
    std::vector<double> contents(d, 0.0);
    for (int i = 0; i < d; ++i)
        if (std::abs(R.basic[i].exponent - R.dim_minkowski) <= R.tolerance) {
            ScalingSamples S = sample_basic(m, i, R.t, P.per_period, false, P.smooth_steps);
            auto r = fit_exponent(S, i);
            contents[i] = r.content;
        }
    if (R.dim_minkowski < d) R.minkowski_content_assembled = minkowski_content_from_basic(contents, R.dim_minkowski, co);
    check_dimension_consistency(R);
    return R;
}

} // namespace fractal_contents
