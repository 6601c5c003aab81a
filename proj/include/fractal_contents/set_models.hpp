#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "strings1d.hpp"

namespace fractal_contents {

// ---------------------------------------------------------------------------
// Prefractal event lists
// ---------------------------------------------------------------------------

struct VertexEvent {
    double threshold;
    double count;
};

struct EdgeEvent {
    double threshold;
    double length;
    double shrink_rate;
};

/**
 * beta_0(t) = persistent_beta0 + vertex_weight * sum_{t* > t} count
 * beta_1(t) = persistent_beta1 + sum_{t* > t} max(length - shrink_rate t, 0)
 * Both lists sorted by threshold, largest first.
 */
struct PrefractalEvents {
    std::vector<VertexEvent> vertex_events;
    std::vector<EdgeEvent> edge_events;
    double persistent_beta0 = 0.0;
    double persistent_beta1 = 0.0;
    double vertex_weight = 1.0; // mu_0 mass carried by one vertex

    double finest_threshold() const
    {
        double f = std::numeric_limits<double>::infinity();
        for (auto& e : vertex_events) f = std::min(f, e.threshold);
        for (auto& e : edge_events) f = std::min(f, e.threshold);
        return f;
    }

    /** Values below this scale depend on levels that were not generated. */
    double trusted_scale() const { return 2.0 * finest_threshold(); }

    double beta0(double t) const
    {
        double c = 0.0;
        for (auto& e : vertex_events) {
            if (!(e.threshold > t)) break;
            c += e.count;
        }
        return persistent_beta0 + vertex_weight * c;
    }

    double beta1(double t) const
    {
        double s = 0.0;
        for (auto& e : edge_events) {
            if (!(e.threshold > t)) break;
            s += std::max(e.length - e.shrink_rate * t, 0.0);
        }
        return persistent_beta1 + s;
    }

    /**
     * Same functions with every jump replaced by linear interpolation in log t
     * through the jump midpoints. Above the first and below the last threshold
     * they agree with beta0/beta1.
     */
    double beta0_smoothed(double t) const
    {
        std::vector<std::pair<double, double>> jumps;
        for (auto& e : vertex_events) jumps.push_back({e.threshold, vertex_weight * e.count});
        return beta0(t) + step_correction(jumps, t);
    }

    double beta1_smoothed(double t) const
    {
        std::vector<std::pair<double, double>> jumps;
        for (auto& e : edge_events) jumps.push_back({e.threshold, std::max(e.length - e.shrink_rate * e.threshold, 0.0)});
        return beta1(t) + step_correction(jumps, t);
    }

private:
    // interpolated step minus the step itself; jumps sorted by threshold, largest first
    static double step_correction(const std::vector<std::pair<double, double>>& jumps, double t)
    {
        double before = 0.0; // jumps at thresholds above the current group
        std::size_t k = 0;
        while (k < jumps.size()) {
            double th = jumps[k].first, g = 0.0;
            std::size_t e = k;
            for (; e < jumps.size() && jumps[e].first == th; ++e) g += jumps[e].second;
            if (e == jumps.size()) return 0.0;
            double nth = jumps[e].first;
            if (t < th && t >= nth) {
                double g2 = 0.0;
                for (std::size_t f = e; f < jumps.size() && jumps[f].first == nth; ++f) g2 += jumps[f].second;
                double m1 = before + 0.5 * g, m2 = before + g + 0.5 * g2;
                double u = std::log(th / t) / std::log(th / nth);
                return m1 + u * (m2 - m1) - (before + g);
            }
            if (t >= th) return 0.0;
            before += g;
            k = e;
        }
        return 0.0;
    }
};

enum class PrefractalKind { window, dust };

struct PrefractalParams {
    double r = 1.0 / 3.0; // window ratio
    double alpha = 17.0 / 32.0;
    int m = 1;
};

namespace detail {

inline void check_threshold(double th)
{
    if (!(th >= std::numeric_limits<double>::min()) || !std::isfinite(th))
        throw generation_error("generate_prefractal: threshold underflows double precision");
}

inline constexpr long max_prefractal_level = 10'000'000;

} // namespace detail

inline PrefractalEvents generate_prefractal(PrefractalKind kind, const PrefractalParams& prm, long level)
{
    if (level < 1) throw std::domain_error("generate_prefractal: level must be >= 1");
    if (level > detail::max_prefractal_level) throw generation_error("generate_prefractal: level too large");
    PrefractalEvents ev;
    if (kind == PrefractalKind::window) {
        double r = prm.r;
        if (!(r > 0.0 && r < 0.5)) throw std::domain_error("fractal window needs r in (0, 1/2)");
        double p = (1.0 - 2.0 * r) / 3.0;
        // corners carry a quarter of the normal circle each
        ev.vertex_weight = 0.25;
        ev.persistent_beta0 = 1.0;
        // outer half of the initial frame never closes; its inner half sees the first frames at distance p
        ev.persistent_beta1 = 2.0;
        ev.edge_events.push_back({p / 2.0, 2.0, 4.0});
        double rj = 1.0;  // r^{j-1}
        double f4 = 4.0;  // 4^j
        double f4r = 4.0 * r; // (4r)^j
        for (long j = 1; j <= level; ++j) {
            double th = p * rj / 2.0;
            detail::check_threshold(th);
            ev.vertex_events.push_back({th, 4.0 * f4});
            ev.edge_events.push_back({th, 4.0 * f4r, 4.0 * f4});
            rj *= r;
            f4 *= 4.0;
            f4r *= 4.0 * r;
        }
    } else {
        double a = prm.alpha;
        if (!(a > 0.5 && a <= 2.0 / 3.0)) throw std::domain_error("enclosed dust needs alpha in (1/2, 2/3]");
        if (prm.m < 1) throw std::domain_error("enclosed dust needs m >= 1");
        ev.persistent_beta0 = 1.0;
        // half perimeter of the enclosing square of area zeta(2 alpha)
        ev.persistent_beta1 = 2.0 * std::sqrt(std::riemann_zeta(2.0 * a));
        for (long j = 1; j <= level; ++j) {
            double jd = static_cast<double>(j);
            double th = std::pow(jd, -(a + prm.m)) / 2.0;
            detail::check_threshold(th);
            double n = std::pow(jd, prm.m) - 1.0;
            if (n > 0.0) ev.vertex_events.push_back({th, n * n});
            ev.edge_events.push_back({th, 2.0 * std::pow(jd, -a), 0.0});
        }
    }
    auto by_threshold = [](auto& x, auto& y) { return x.threshold > y.threshold; };
    std::stable_sort(ev.vertex_events.begin(), ev.vertex_events.end(), by_threshold);
    std::stable_sort(ev.edge_events.begin(), ev.edge_events.end(), by_threshold);
    return ev;
}

// ---------------------------------------------------------------------------
// Set models
// ---------------------------------------------------------------------------

enum class ModelKind {
    disc,
    circle,
    square_boundary,
    parallel_segments,
    sierpinski_gasket,
    cantor_ternary,
    svc,
    fractal_window,
    enclosed_dust,
    string_set
};

inline const char* model_kind_name(ModelKind k)
{
    switch (k) {
    case ModelKind::disc: return "disc";
    case ModelKind::circle: return "circle";
    case ModelKind::square_boundary: return "square_boundary";
    case ModelKind::parallel_segments: return "parallel_segments";
    case ModelKind::sierpinski_gasket: return "sierpinski_gasket";
    case ModelKind::cantor_ternary: return "cantor";
    case ModelKind::svc: return "svc";
    case ModelKind::fractal_window: return "fractal_window";
    case ModelKind::enclosed_dust: return "enclosed_dust";
    case ModelKind::string_set: return "string";
    }
    return "?";
}

/** Inradius of the first removed triangle of the unit gasket. */
inline const double gasket_g = 1.0 / (4.0 * std::sqrt(3.0));

class SetModel {
public:
    static SetModel disc(double R) { return sized(ModelKind::disc, {R}); }
    static SetModel circle(double R) { return sized(ModelKind::circle, {R}); }
    static SetModel square_boundary(double a) { return sized(ModelKind::square_boundary, {a}); }
    static SetModel parallel_segments(double length, double gap) { return sized(ModelKind::parallel_segments, {length, gap}); }

    static SetModel sierpinski_gasket()
    {
        SetModel m;
        m.kind_ = ModelKind::sierpinski_gasket;
        return m;
    }

    static SetModel cantor()
    {
        SetModel m;
        m.kind_ = ModelKind::cantor_ternary;
        m.string_ = std::make_shared<const FractalString>(FractalString::cantor());
        return m;
    }

    static SetModel svc(double a)
    {
        SetModel m;
        m.kind_ = ModelKind::svc;
        m.params_ = {a};
        m.string_ = std::make_shared<const FractalString>(FractalString::svc(a));
        return m;
    }

    static SetModel string_set(FractalString s)
    {
        SetModel m;
        m.kind_ = ModelKind::string_set;
        m.string_ = std::make_shared<const FractalString>(std::move(s));
        return m;
    }

    static SetModel fractal_window(double r, long level)
    {
        SetModel m;
        m.kind_ = ModelKind::fractal_window;
        m.params_ = {r};
        m.level_ = level;
        PrefractalParams p;
        p.r = r;
        m.events_ = std::make_shared<const PrefractalEvents>(generate_prefractal(PrefractalKind::window, p, level));
        return m;
    }

    static SetModel enclosed_dust(double alpha, int mexp, long level)
    {
        SetModel m;
        m.kind_ = ModelKind::enclosed_dust;
        m.params_ = {alpha, static_cast<double>(mexp)};
        m.level_ = level;
        PrefractalParams p;
        p.alpha = alpha;
        p.m = mexp;
        m.events_ = std::make_shared<const PrefractalEvents>(generate_prefractal(PrefractalKind::dust, p, level));
        return m;
    }

    ModelKind kind() const { return kind_; }
    int dim() const
    {
        switch (kind_) {
        case ModelKind::cantor_ternary:
        case ModelKind::svc:
        case ModelKind::string_set: return 1;
        default: return 2;
        }
    }
    const std::vector<double>& params() const { return params_; }
    long level() const { return level_; }
    /** Extra similarity factor for kinds without a size parameter. */
    double scale() const { return scale_; }
    const FractalString* string() const { return string_.get(); }
    const PrefractalEvents* events() const { return events_.get(); }

    bool has_size_parameter() const
    {
        return kind_ == ModelKind::disc || kind_ == ModelKind::circle || kind_ == ModelKind::square_boundary ||
               kind_ == ModelKind::parallel_segments;
    }

    SetModel scaled(double r) const
    {
        if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("scale_model needs r > 0");
        SetModel m = *this;
        if (has_size_parameter())
            for (double& p : m.params_) p *= r;
        else
            m.scale_ *= r;
        return m;
    }

private:
    static SetModel sized(ModelKind k, std::vector<double> p)
    {
        for (double v : p)
            if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error(std::string(model_kind_name(k)) + ": size parameters must be positive");
        SetModel m;
        m.kind_ = k;
        m.params_ = std::move(p);
        return m;
    }

    ModelKind kind_ = ModelKind::disc;
    std::vector<double> params_;
    long level_ = 0;
    double scale_ = 1.0;
    std::shared_ptr<const FractalString> string_;
    std::shared_ptr<const PrefractalEvents> events_;
};

inline SetModel scale_model(const SetModel& m, double r) { return m.scaled(r); }

// ---------------------------------------------------------------------------
// Basic functions
// ---------------------------------------------------------------------------

enum class Exactness { closed_form, combinatorial_count, truncated };

struct BasicValue {
    double value = 0.0;
    bool truncated = false;
};

namespace detail {

inline void check_index(const SetModel& m, int i, double t)
{
    if (i < 0 || i >= m.dim()) throw std::domain_error("beta: index out of range for this model");
    if (!(t > 0.0)) throw std::domain_error("beta: t must be positive");
}

// smallest n >= 0 with g 2^{-n} <= t
inline int gasket_level(double t)
{
    int n = 0;
    while (std::ldexp(gasket_g, -n) > t) {
        ++n;
        if (n > 1100) break;
    }
    return n;
}

inline double gasket_beta1(double t)
{
    int n = gasket_level(t);
    return std::pow(1.5, n + 1) - 1.5 * std::sqrt(3.0) * (std::pow(3.0, n) - 1.0) * t;
}

inline double segments_beta0(double gap, double t)
{
    if (t < gap / 2.0) return 2.0;
    return 1.0 + 2.0 / std::numbers::pi * std::asin(gap / (2.0 * t));
}

// Unscaled evaluation; var selects the total-variation function.
inline BasicValue base_beta(const SetModel& m, int i, double t, bool var)
{
    const auto& p = m.params();
    switch (m.kind()) {
    case ModelKind::disc: return {i == 0 ? 1.0 : p[0] * std::numbers::pi};
    case ModelKind::circle: {
        double R = p[0];
        if (i == 0) return {var ? (t < R ? 2.0 : 1.0) : (t < R ? 0.0 : 1.0)};
        return {t < R ? 2.0 * R * std::numbers::pi : R * std::numbers::pi};
    }
    case ModelKind::square_boundary: {
        double a = p[0];
        if (i == 0) return {1.0};
        return {2.0 * a + (t < a / 2.0 ? 2.0 * a - 4.0 * t : 0.0)};
    }
    case ModelKind::parallel_segments: {
        double l = p[0], gap = p[1];
        if (i == 0) return {segments_beta0(gap, t)};
        return {t < gap / 2.0 ? 2.0 * l : l};
    }
    case ModelKind::sierpinski_gasket: return {i == 0 ? 1.0 : gasket_beta1(t)};
    case ModelKind::cantor_ternary:
    case ModelKind::svc:
    case ModelKind::string_set: return {beta0_string(*m.string(), t)};
    case ModelKind::fractal_window:
    case ModelKind::enclosed_dust: {
        const auto& ev = *m.events();
        BasicValue b{i == 0 ? ev.beta0(t) : ev.beta1(t)};
        b.truncated = t < ev.trusted_scale();
        return b;
    }
    }
    return {};
}

} // namespace detail

inline BasicValue evaluate_beta(const SetModel& m, int i, double t, bool var = false)
{
    detail::check_index(m, i, t);
    double s = m.scale();
    if (s == 1.0) return detail::base_beta(m, i, t, var);
    BasicValue b = detail::base_beta(m, i, t / s, var);
    b.value *= std::pow(s, i);
    return b;
}

inline double beta(const SetModel& m, int i, double t) { return evaluate_beta(m, i, t, false).value; }
inline double beta_var(const SetModel& m, int i, double t) { return evaluate_beta(m, i, t, true).value; }

/** beta_i, with jump-midpoint interpolation for prefractal event models. */
inline double beta_smoothed(const SetModel& m, int i, double t)
{
    if (m.kind() != ModelKind::fractal_window && m.kind() != ModelKind::enclosed_dust) return beta(m, i, t);
    detail::check_index(m, i, t);
    double s = m.scale();
    const auto& ev = *m.events();
    double u = t / s;
    return std::pow(s, i) * (i == 0 ? ev.beta0_smoothed(u) : ev.beta1_smoothed(u));
}

/** Known upper exponent of beta_i^var; -inf when it vanishes identically. */
inline double known_exponent(const SetModel& m, int i)
{
    switch (m.kind()) {
    case ModelKind::sierpinski_gasket: return i == 0 ? 0.0 : std::log2(3.0);
    case ModelKind::cantor_ternary:
    case ModelKind::svc:
    case ModelKind::string_set: return m.string()->is_finite() ? 0.0 : m.string()->abscissa();
    default: return static_cast<double>(i); // bounded basic functions
    }
}

/** Limit-set exponents quoted for the generated prefractal families. */
inline std::optional<double> reference_exponent(const SetModel& m, int i)
{
    const auto& p = m.params();
    if (m.kind() == ModelKind::fractal_window) {
        double d = std::log(4.0) / std::log(1.0 / p[0]);
        return i == 0 ? d : std::max(1.0, d);
    }
    if (m.kind() == ModelKind::enclosed_dust) {
        double a = p[0], mm = p[1];
        return i == 0 ? (1.0 + 2.0 * mm) / (a + mm) : (1.0 + mm) / (a + mm);
    }
    if (m.kind() == ModelKind::sierpinski_gasket || m.kind() == ModelKind::cantor_ternary ||
        m.kind() == ModelKind::svc || m.kind() == ModelKind::string_set)
        return known_exponent(m, i);
    return static_cast<double>(i);
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

/** beta_i of one model packaged with its breakpoints for integration and checks. */
struct BasicFunctionProfile {
    int index = 0;
    int dim = 2;
    std::function<double(double)> evaluate;
    std::function<double(double)> evaluate_var;
    std::vector<double> breakpoints; // ascending, inside (0, t_max]
    double t_max = 1.0;
    Exactness exactness = Exactness::closed_form;
    double exponent = 0.0;
    // beta is affine between consecutive breakpoints
    bool affine_pieces = true;
    // int_0^{breakpoints.front()} t^{s-i-1} beta(t) dt when beta has infinitely many pieces there
    std::function<cplx(cplx)> tail;
    double trusted_scale = 0.0;
};

namespace detail {

inline cplx cpow(double x, cplx s) { return real_pow(x, s); }

// int_0^{g 2^{-N+1}} t^{s-2} beta_1(t) dt for the gasket, N >= 1
inline cplx gasket_tail(cplx s, int N)
{
    const double g = gasket_g;
    cplx x = 3.0 * cpow(2.0, -s);
    cplx z = cpow(2.0, -s);
    cplx xN = std::pow(x, N);
    cplx zN = std::pow(z, N);
    cplx aPart = (cpow(2.0, s - 1.0) - 1.0) / (s - 1.0) * 1.5 * cpow(g, s - 1.0) * xN / (1.0 - x);
    cplx bPart = (cpow(2.0, s) - 1.0) / s * 1.5 * std::sqrt(3.0) * cpow(g, s) * (xN / (1.0 - x) - zN / (1.0 - z));
    return aPart - bPart;
}

} // namespace detail

/**
 * Profile of beta_i on (0, t_max]. Infinite families list breakpoints down to
 * t_min and carry a closed-form tail below.
 */
inline BasicFunctionProfile make_profile(const SetModel& m, int i, double t_max, double t_min = 0.0)
{
    detail::check_index(m, i, t_max);
    if (!(t_min > 0.0)) t_min = t_max * 1e-12;
    const double sc = m.scale();
    BasicFunctionProfile pr;
    pr.index = i;
    pr.dim = m.dim();
    pr.t_max = t_max;
    pr.evaluate = [m, i](double t) { return beta(m, i, t); };
    pr.evaluate_var = [m, i](double t) { return beta_var(m, i, t); };
    pr.exponent = known_exponent(m, i);
    std::vector<double> bp; // unscaled
    const double lo = t_min / sc, hi = t_max / sc;
    const auto& p = m.params();
    switch (m.kind()) {
    case ModelKind::disc: break;
    case ModelKind::circle: bp.push_back(p[0]); break;
    case ModelKind::square_boundary:
        if (i == 1) bp.push_back(p[0] / 2.0);
        break;
    case ModelKind::parallel_segments:
        bp.push_back(p[1] / 2.0);
        if (i == 0) pr.affine_pieces = false;
        break;
    case ModelKind::sierpinski_gasket:
        if (i == 1) {
            int n = 0;
            while (std::ldexp(gasket_g, -n) > hi) ++n;
            while (std::ldexp(gasket_g, -n) >= lo) bp.push_back(std::ldexp(gasket_g, -n++));
            if (bp.empty()) bp.push_back(std::ldexp(gasket_g, -n++));
            // lowest listed breakpoint is g 2^{-N+1}
            int N = n;
            double s_i = sc;
            pr.tail = [N, s_i](cplx s) { return detail::cpow(s_i, s) * detail::gasket_tail(s, N); };
        }
        break;
    case ModelKind::cantor_ternary:
    case ModelKind::svc:
    case ModelKind::string_set: {
        const FractalString& str = *m.string();
        pr.exactness = Exactness::combinatorial_count;
        std::size_t mm = 1;
        while (mm <= str.level_count() && str.length(mm) / 2.0 > hi) ++mm;
        while (mm <= str.level_count() && str.length(mm) / 2.0 >= lo) bp.push_back(str.length(mm++) / 2.0);
        if (!str.is_finite()) {
            if (bp.empty()) bp.push_back(str.length(mm++) / 2.0);
            std::size_t K = mm - 1; // lowest listed breakpoint is l~_K / 2
            double s_i = sc;
            pr.tail = [m, K, s_i](cplx s) {
                const FractalString& st = *m.string();
                double b = st.length(K) / 2.0;
                double W = st.cumulative(K - 1);
                cplx v = ((1.0 + W) * detail::cpow(b, s) + detail::cpow(0.5, s) * st.tail_zeta(K, s)) / s;
                return detail::cpow(s_i, s) * v;
            };
        }
        break;
    }
    case ModelKind::fractal_window:
    case ModelKind::enclosed_dust: {
        const auto& ev = *m.events();
        pr.exactness = Exactness::truncated;
        pr.trusted_scale = ev.trusted_scale() * sc;
        if (i == 0)
            for (auto& e : ev.vertex_events) bp.push_back(e.threshold);
        else
            for (auto& e : ev.edge_events) {
                bp.push_back(e.threshold);
                if (e.shrink_rate > 0.0 && e.length / e.shrink_rate < e.threshold) bp.push_back(e.length / e.shrink_rate);
            }
        break;
    }
    }
    std::vector<double> out;
    for (double b : bp) {
        double v = b * sc;
        if (v <= t_max) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    pr.breakpoints = std::move(out);
    return pr;
}

// ---------------------------------------------------------------------------
// Exact tube volumes
// ---------------------------------------------------------------------------

namespace detail {

// area of the intersection of two discs of radius e with centres at distance g <= 2e
inline double lens_area(double e, double g)
{
    if (g >= 2.0 * e) return 0.0;
    return 2.0 * e * e * std::acos(g / (2.0 * e)) - (g / 2.0) * std::sqrt(4.0 * e * e - g * g);
}

inline std::optional<double> base_tube_volume(const SetModel& m, double e)
{
    const double pi = std::numbers::pi;
    const auto& p = m.params();
    switch (m.kind()) {
    case ModelKind::disc: return 2.0 * pi * p[0] * e + pi * e * e;
    case ModelKind::circle: {
        double R = p[0];
        if (e < R) return 4.0 * pi * R * e;
        return pi * (R + e) * (R + e);
    }
    case ModelKind::square_boundary: {
        double a = p[0];
        double outer = 4.0 * a * e + pi * e * e;
        double inner = e < a / 2.0 ? a * a - (a - 2.0 * e) * (a - 2.0 * e) : a * a;
        return outer + inner;
    }
    case ModelKind::parallel_segments: {
        double l = p[0], g = p[1];
        double stadium = 2.0 * l * e + pi * e * e;
        if (e < g / 2.0) return 2.0 * stadium;
        // the two stadiums overlap in a band of width 2e-g plus one lens split over both ends
        return 2.0 * stadium - l * (2.0 * e - g) - lens_area(e, g);
    }
    case ModelKind::cantor_ternary:
    case ModelKind::svc:
    case ModelKind::string_set: return tube_volume_1d(*m.string(), e).direct;
    default: return std::nullopt;
    }
}

} // namespace detail

/** V(A_eps \ A) from elementary geometry, when known. */
inline std::optional<double> exact_tube_volume(const SetModel& m, double eps)
{
    if (!(eps > 0.0)) throw std::domain_error("exact_tube_volume needs eps > 0");
    double s = m.scale();
    auto v = detail::base_tube_volume(m, eps / s);
    if (!v) return v;
    return *v * std::pow(s, m.dim());
}

} // namespace fractal_contents
