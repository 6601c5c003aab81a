#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fractal_contents/estimators.hpp"

using namespace fractal_contents;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

constexpr double pi = std::numbers::pi;

namespace {

double gasket_beta1_by_holes(double t)
{
    double b = 1.5;
    for (int k = 1; k < 300; ++k) {
        double side = std::ldexp(1.0, -k);
        if (!(t < side / (2.0 * std::sqrt(3.0)))) break;
        b += std::pow(3.0, k - 1) * 1.5 * (side - 2.0 * std::sqrt(3.0) * t);
    }
    return b;
}

// composite Simpson on each dyadic piece of the gasket, down to g 2^-250
cplx gasket_zeta_simpson(cplx s, double eps)
{
    cplx acc = 0.0;
    double hi = eps;
    int n = 0;
    while (std::ldexp(gasket_g, -n) >= eps) ++n;
    for (; n < 250; ++n) {
        double lo = std::ldexp(gasket_g, -n);
        const int m = 512;
        double h = (hi - lo) / m;
        auto f = [&](double t) { return std::pow(cplx(t), s - 2.0) * gasket_beta1_by_holes(t); };
        // evaluate just inside the piece so the hole count matches the open interval
        auto fin = [&](double t) { return f(std::clamp(t, lo * (1.0 + 1e-13), hi * (1.0 - 1e-13))); };
        cplx sum = fin(lo) + fin(hi);
        for (int k = 1; k < m; ++k) sum += (k % 2 ? 4.0 : 2.0) * fin(lo + k * h);
        acc += sum * h / 3.0;
        hi = lo;
    }
    return acc;
}

ScalingSamples samples_of(const std::vector<double>& t, const std::vector<double>& v, int per_period = 1)
{
    ScalingSamples S;
    S.t = t;
    S.values = v;
    S.per_period = per_period;
    return S;
}

std::vector<double> geometric_scales(double top, double ratio, int n)
{
    std::vector<double> t;
    for (int k = 0; k < n; ++k) t.push_back(top * std::pow(ratio, k));
    return t;
}

} // namespace

TEST_CASE("basic zeta of a disc")
{
    auto pr = make_profile(SetModel::disc(1.0), 1, 1.0);
    CHECK_THAT(basic_zeta(pr, 2.0, 1.0).real(), WithinRel(pi, 1e-14));
    // pi R eps^{s-1} / (s - 1)
    cplx s(1.7, 2.0);
    cplx want = pi * std::pow(cplx(0.3), s - 1.0) / (s - 1.0);
    CHECK(std::abs(basic_zeta(make_profile(SetModel::disc(1.0), 1, 0.3), s, 0.3) - want) < 1e-13);
}

TEST_CASE("gasket basic zeta against Simpson over the dyadic pieces")
{
    auto g = SetModel::sierpinski_gasket();
    for (cplx s : {cplx(2.0, 0.0), cplx(1.8, 0.0), cplx(1.9, 5.0)}) {
        for (double eps : {0.1, 0.01}) {
            auto pr = make_profile(g, 1, eps);
            cplx want = gasket_zeta_simpson(s, eps);
            CHECK(std::abs(basic_zeta(pr, s, eps) - want) < 1e-7 * std::abs(want));
            CHECK(std::abs(basic_zeta_quadrature(pr, s, eps) - want) < 1e-7 * std::abs(want));
        }
    }
}

TEST_CASE("basic zeta diverges at the basic exponent")
{
    auto g = SetModel::sierpinski_gasket();
    auto pr = make_profile(g, 1, 0.1);
    CHECK_THROWS_AS(basic_zeta(pr, std::log2(3.0), 0.1), divergence_error);
    CHECK_THROWS_AS(basic_zeta(pr, 2.0, 0.5), std::domain_error);
    auto seg = make_profile(SetModel::parallel_segments(1.0, 0.2), 0, 0.5);
    CHECK_THROWS_AS(basic_zeta(seg, 2.0, 0.5), std::domain_error);
}

TEST_CASE("distance zeta at s = d is the tube volume")
{
    for (auto m : {SetModel::disc(1.0), SetModel::square_boundary(1.0), SetModel::parallel_segments(1.0, 0.2)}) {
        for (double eps : {0.05, 0.3}) {
            auto prof = model_profiles(m, eps);
            CHECK_THAT(distance_zeta_from_basic(prof, 2.0, eps).real(), WithinRel(*exact_tube_volume(m, eps), 1e-9));
        }
    }
}

TEST_CASE("support masses of a disc are its curvature measures")
{
    SteinerCoefficients co(2);
    const double R = 1.3;
    for (double eps : {0.01, 0.5, 4.0}) {
        auto mu = support_masses(std::vector<double>{1.0, pi * R}, co, eps);
        CHECK(mu[0] == 1.0);
        CHECK_THAT(mu[1], WithinRel(pi * (R + eps), 1e-14));
    }
}

TEST_CASE("support masses and basic values round trip")
{
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> U(-5.0, 5.0), E(1e-3, 2.0);
    for (int d = 1; d <= 6; ++d) {
        SteinerCoefficients co(d);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> b(d);
            for (double& x : b) x = U(rng);
            double eps = E(rng);
            auto back = basic_from_support(support_masses(b, co, eps), co, eps);
            for (int i = 0; i < d; ++i) CHECK_THAT(back[i], WithinAbs(b[i], 1e-10 * std::max(1.0, std::abs(b[i]))));
        }
    }
    CHECK_THROWS_AS(support_masses(std::vector<double>{1.0}, SteinerCoefficients(2), 0.1), std::domain_error);
}

TEST_CASE("total variation bound on elementary sets")
{
    SteinerCoefficients co2(2), co1(1);
    for (auto m : {SetModel::disc(1.0), SetModel::circle(1.0), SetModel::square_boundary(1.0), SetModel::parallel_segments(1.0, 0.2)})
        for (double eps : {0.01, 0.05, 0.09}) {
            auto rep = variation_bound_check(m, co2, eps);
            REQUIRE(rep.computable);
            CHECK(rep.holds());
        }
    auto rep = variation_bound_check(SetModel::cantor(), co1, 0.01);
    CHECK(rep.computable);
    CHECK(rep.holds());
    CHECK_FALSE(variation_bound_check(SetModel::sierpinski_gasket(), co2, 0.01).computable);
}

TEST_CASE("Minkowski contents assembled from basic contents")
{
    SteinerCoefficients co(2);
    // circle: M_0 = 0, M_1 = 2 pi R at q = 1, and V / eps -> 4 pi R
    CHECK_THAT(minkowski_content_from_basic({0.0, 2.0 * pi}, 1.0, co), WithinRel(4.0 * pi, 1e-14));
    // disc, outer content: the perimeter
    CHECK_THAT(minkowski_content_from_basic({0.0, pi}, 1.0, co), WithinRel(2.0 * pi, 1e-14));
    CHECK_THROWS_AS(minkowski_content_from_basic({0.0, pi}, 2.0, co), std::domain_error);
}

TEST_CASE("fit_exponent: constants, powers and limits")
{
    auto t = geometric_scales(0.5, 0.7, 40);
    {
        std::vector<double> v(t.size(), 3.0);
        auto r = fit_exponent(samples_of(t, v), 0);
        CHECK(r.method == FitMethod::constant);
        CHECK(r.exponent == 0.0);
        CHECK(r.content == 3.0);
    }
    {
        std::vector<double> v;
        for (double x : t) v.push_back(3.0 * std::pow(x, -0.7) + 5.0);
        auto r = fit_exponent(samples_of(t, v), 0);
        CHECK(r.method == FitMethod::differences);
        CHECK_THAT(r.exponent, WithinAbs(0.7, 1e-9));
        CHECK_THAT(r.upper_content, WithinRel(3.0, 2e-2));
    }
    {
        // f -> 2 + O(t): the limit is found and the exponent is the index
        std::vector<double> v;
        for (double x : t) v.push_back(2.0 + 4.0 * x);
        auto r = fit_exponent(samples_of(t, v), 1);
        CHECK(r.method == FitMethod::limit);
        CHECK(r.exponent == 1.0);
        CHECK_THAT(r.content, WithinRel(2.0, 1e-9));
    }
    {
        // t^{1 - q} with q = 0.3 at index 1 decays to zero
        std::vector<double> v;
        for (double x : t) v.push_back(std::pow(x, 0.7));
        auto r = fit_exponent(samples_of(t, v), 1);
        CHECK(r.method == FitMethod::decay);
        CHECK_THAT(r.exponent, WithinAbs(0.3, 1e-9));
    }
}

TEST_CASE("fit_exponent: zero functions and sign changes")
{
    auto t = geometric_scales(0.5, 0.5, 10);
    auto r = fit_exponent(samples_of(t, std::vector<double>(t.size(), 0.0)), 0);
    CHECK(r.method == FitMethod::zero);
    CHECK(std::isinf(r.exponent));
    std::vector<double> v;
    for (std::size_t k = 0; k < t.size(); ++k) v.push_back(k % 2 ? -1.0 : 1.0);
    CHECK(fit_exponent(samples_of(t, v), 0).sign_change);
}

TEST_CASE("fit_exponent rejects malformed samples")
{
    CHECK_THROWS_AS(fit_exponent(samples_of({0.1}, {1.0}), 0), std::domain_error);
    CHECK_THROWS_AS(fit_exponent(samples_of({0.1, 0.2}, {1.0, 2.0}), 0), std::domain_error);
    CHECK_THROWS_AS(fit_exponent(samples_of({0.1, 0.05}, {1.0}), 0), std::domain_error);
    CHECK_THROWS_AS(fit_exponent(samples_of({0.1, 0.05}, {1.0, NAN}), 0), std::domain_error);
}

TEST_CASE("Cantor beta_0 oscillates between 2^-D / 2 and 3^D 2^-D / 2")
{
    auto m = SetModel::cantor();
    const double D = std::log(2.0) / std::log(3.0);
    SamplingPlan P = default_plan(m);
    P.per_period = 8;
    auto t = sample_scales(P);
    auto r = fit_exponent(sample_basic(m, 0, t, P.per_period), 0);
    CHECK_THAT(r.exponent, WithinAbs(D, 1e-3));
    CHECK(r.oscillation_flag);
    // t^D beta_0 over t in [3^-k / 2, 3^{-k+1} / 2) sweeps [2^-D / 2, 3^D 2^-D / 2)
    double lo = std::pow(2.0, -D) / 2.0, hi = std::pow(3.0, D) * lo;
    CHECK(r.lower_content >= lo * (1.0 - 1e-9));
    CHECK(r.upper_content < hi);
    CHECK(r.upper_content > r.lower_content * 1.5);
}

TEST_CASE("lattice sampling without oscillation")
{
    auto m = SetModel::cantor();
    auto r = fit_exponent(sample_basic(m, 0, sample_scales(default_plan(m)), 1), 0);
    CHECK_FALSE(r.oscillation_flag);
}

TEST_CASE("sample_scales hits exact powers of integer inverse ratios")
{
    SamplingPlan P;
    P.t_top = 0.5;
    P.ratio = 1.0 / 3.0;
    P.periods = 10;
    auto t = sample_scales(P);
    REQUIRE(t.size() == 11);
    for (int j = 0; j <= 10; ++j) CHECK(t[j] == 0.5 / std::pow(3.0, j));
    P.per_period = 0;
    CHECK_THROWS_AS(sample_scales(P), std::domain_error);
}

TEST_CASE("dimension reports of analytic models")
{
    auto disc = dimension_report(SetModel::disc(1.0));
    CHECK_THAT(disc.dim_minkowski, WithinAbs(1.0, 1e-2));
    CHECK(disc.discrepancies.empty());

    auto g = dimension_report(SetModel::sierpinski_gasket());
    CHECK_THAT(g.dim_minkowski, WithinAbs(std::log2(3.0), 1e-2));
    CHECK_THAT(g.basic[1].exponent, WithinAbs(std::log2(3.0), 1e-2));
    CHECK(g.discrepancies.empty());

    auto c = dimension_report(SetModel::cantor());
    CHECK_THAT(c.dim_minkowski, WithinAbs(std::log(2.0) / std::log(3.0), 1e-2));
    CHECK(c.beta_samples.size() == 1);
}

TEST_CASE("fractal window M_1 content")
{
    auto m = SetModel::fractal_window(0.2, 40);
    SamplingPlan P = default_plan(m);
    auto r = fit_exponent(sample_basic(m, 1, sample_scales(P), P.per_period), 1);
    CHECK(r.exponent == 1.0);
    CHECK_THAT(r.content, WithinRel(20.0, 1e-2));
}

TEST_CASE("enclosed dust m_1")
{
    auto m = SetModel::enclosed_dust(17.0 / 32.0, 1, 200);
    SamplingPlan P = default_plan(m);
    auto r = fit_exponent(sample_basic(m, 1, sample_scales(P), P.per_period, true, P.smooth_steps), 1);
    CHECK_THAT(r.exponent, WithinAbs(64.0 / 49.0, 2e-2));
}

TEST_CASE("enclosed dust m_0 moves toward 96/49 as the level grows")
{
    auto fit0 = [](long level) {
        auto m = SetModel::enclosed_dust(17.0 / 32.0, 1, level);
        SamplingPlan P = default_plan(m);
        return fit_exponent(sample_basic(m, 0, sample_scales(P), P.per_period, true, P.smooth_steps), 0).exponent;
    };
    const double want = 96.0 / 49.0;
    CHECK(std::abs(fit0(1000) - want) < std::abs(fit0(40) - want));
}

TEST_CASE("least squares recovers a line")
{
    auto f = least_squares({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
    CHECK_THAT(f.slope, WithinRel(2.0, 1e-14));
    CHECK_THAT(f.intercept, WithinRel(1.0, 1e-14));
    CHECK_THAT(f.residual, WithinAbs(0.0, 1e-14));
}
