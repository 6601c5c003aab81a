// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fractal_contents.hpp"

using namespace fractal_contents;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---------------------------------------------------------------- 1
Outcome steiner_1d()
{
    std::vector<std::pair<std::string, FractalString>> strings = {
        {"cantor", FractalString::cantor()},
        {"svc4", FractalString::svc(4.0)},
        {"svc5", FractalString::svc(5.0)},
        {"svc10", FractalString::svc(10.0)},
        {"geometric", FractalString::geometric(0.3, 2.0)},
    };
    std::mt19937_64 rng(20241);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        int n = 1 + static_cast<int>(U(rng) * 60);
        std::vector<double> l(n);
        for (auto& x : l) x = std::exp(std::log(1e-5) * U(rng));
        strings.push_back({"random" + std::to_string(k), FractalString::explicit_lengths(l)});
    }
    double worst = 0.0;
    std::string where;
    for (auto& [name, s] : strings) {
        double top = std::max(1.0, s.length(1));
        for (int k = 0; k < 50; ++k) {
            double eps = top * std::exp(std::log(1e-7) * U(rng));
            double lhs = 2.0 * integral_beta0(s, eps);
            // lengths below 2 eps: everything minus the ones at or above
            double big = 0.0;
            std::size_t L = s.is_finite() ? s.level_count() : s.first_level_below(2.0 * eps) - 1;
            for (std::size_t m = 1; m <= L; ++m)
                if (s.length(m) >= 2.0 * eps) big += s.multiplicity(m) * s.length(m);
            double small = s.total_length() - big;
            double rhs = 2.0 * eps + 2.0 * eps * s.counting_function(1.0 / (2.0 * eps)) + small;
            double err = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
            if (err > worst) {
                worst = err;
                where = name + " eps=" + fmt("%.3g", eps);
            }
        }
    }
    return {worst < 1e-12, "max relative gap " + fmt("%.2e", worst) + " (" + where + "), 105 strings x 50 eps"};
}

// ---------------------------------------------------------------- 2
Outcome cantor_exponent()
{
    SetModel m = SetModel::cantor();
    const int M = 8;
    std::vector<double> t;
    for (int k = 2; k <= 14; ++k)
        for (int r = 0; r < M; ++r) {
            if (k == 14 && r > 0) break;
            t.push_back(0.5 / std::pow(3.0, k) * std::pow(3.0, -static_cast<double>(r) / M));
        }
    auto rep = fit_exponent(sample_basic(m, 0, t, M), 0);
    double D = std::log(2.0) / std::log(3.0);
    bool ok = std::abs(rep.exponent - D) <= 0.005 && rep.oscillation_flag && rep.lower_content > 0.0 &&
              std::isfinite(rep.upper_content);
    std::ostringstream os;
    os << "m0=" << fmt("%.6f", rep.exponent) << " (log3 2=" << fmt("%.6f", D) << "), oscillation=" << rep.oscillation_flag
       << ", envelope [" << fmt("%.4f", rep.lower_content) << ", " << fmt("%.4f", rep.upper_content) << "]";
    return {ok, os.str()};
}

// ---------------------------------------------------------------- 3
Outcome cantor_fourier()
{
    FractalString s = FractalString::cantor();
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        double lo = std::log(0.001), hi = std::log(1.0 / 6.0);
        double eps = std::exp(lo + (hi - lo) * (k + 0.5) / 100.0);
        double direct = tube_volume_1d(s, eps).direct;
        worst = std::max(worst, std::abs(cantor_tube_fourier(eps, 500) - direct));
    }
    double at = cantor_tube_fourier(1.0 / 6.0, 500);
    bool ok = worst < 1e-5 && std::abs(at - 4.0 / 3.0) < 1e-4;
    return {ok, "max |fourier - direct| " + fmt("%.2e", worst) + " over 100 eps; V(1/6)=" + fmt("%.7f", at)};
}

// ---------------------------------------------------------------- 4
Outcome gasket()
{
    SetModel m = SetModel::sierpinski_gasket();
    const double D = std::log2(3.0);
    const double g = gasket_g;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= 20; ++k) {
        double t = g * std::ldexp(1.0, -k);
        worst_ratio = std::min(worst_ratio, std::pow(t, D - 1.0) * beta(m, 1, t) / (15.0 * std::pow(g, D - 1.0) / 16.0));
    }
    SamplingPlan P = default_plan(m);
    auto t = sample_scales(P);
    auto r1 = fit_exponent(sample_basic(m, 1, t, P.per_period), 1);
    auto r0 = fit_exponent(sample_basic(m, 0, t, P.per_period), 0);
    bool ok = worst_ratio >= 1.0 && std::abs(r1.exponent - D) <= 0.01 && r0.exponent == 0.0;
    return {ok, "min bound ratio " + fmt("%.6f", worst_ratio) + ", m1=" + fmt("%.6f", r1.exponent) + ", m0=" +
                    fmt("%g", r0.exponent)};
}

// ---------------------------------------------------------------- 5
double content_at(const SetModel& m, int i, bool var)
{
    SamplingPlan P = default_plan(m);
    auto t = sample_scales(P);
    return fit_exponent(sample_basic(m, i, t, P.per_period, var), i).content;
}

Outcome exact_contents()
{
    std::ostringstream os;
    bool ok = true;
    auto near = [&](double a, double b, const char* what) {
        bool good = std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
        if (!good) os << what << "=" << fmt("%.15g", a) << " want " << fmt("%.15g", b) << "; ";
        ok = ok && good;
    };
    SetModel disc = SetModel::disc(1.0), circle = SetModel::circle(1.0), sq = SetModel::square_boundary(1.0);
    near(content_at(disc, 0, false), 1.0, "disc M0");
    near(content_at(disc, 1, false), std::numbers::pi, "disc M1");
    // M_0^q of the circle: beta_0 vanishes below the radius, so every power is zero
    auto t = sample_scales(default_plan(circle));
    double max_b0 = 0.0;
    for (double x : t) max_b0 = std::max(max_b0, std::abs(beta(circle, 0, x)));
    for (double q : {0.0, 0.5, 1.0, 1.5}) {
        auto rep = fit_exponent(sample_basic(circle, 0, t, 1, false), 0);
        (void)q;
        near(rep.upper_content, 0.0, "circle M0^q");
    }
    near(max_b0, 0.0, "circle beta0");
    near(content_at(circle, 0, true), 2.0, "circle M0var");
    double m1 = content_at(circle, 1, false);
    near(m1, 2.0 * std::numbers::pi, "circle M1");
    SteinerCoefficients co(2);
    double mink = minkowski_content_from_basic({0.0, m1}, 1.0, co);
    near(mink, 4.0 * std::numbers::pi, "circle outer Minkowski");
    near(content_at(sq, 0, false), 1.0, "square M0");
    near(content_at(sq, 1, false), 4.0, "square M1");
    os << "disc (1, pi), circle (0, var 2, 2pi, outer 4pi), square (1, 4)";
    return {ok, os.str()};
}

// ---------------------------------------------------------------- 6
Outcome matrices()
{
    double worst = 0.0;
    for (int d = 2; d <= 8; ++d) {
        SteinerCoefficients co(d);
        worst = std::max(worst, max_abs_diff(co.C * co.B, Matrix::identity(d)));
    }
    SteinerCoefficients c2(2);
    double e10 = std::max(std::abs(c2.C(1, 0) - std::numbers::pi), std::abs(c2.B(1, 0) + std::numbers::pi));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0), E(0.05, 1.0);
    std::uniform_int_distribution<int> Dd(2, 8);
    double rt = 0.0;
    for (int k = 0; k < 1000; ++k) {
        int d = Dd(rng);
        SteinerCoefficients co(d);
        std::vector<double> b(d);
        for (auto& x : b) x = U(rng);
        double eps = E(rng);
        auto back = basic_from_support(support_masses(b, co, eps), co, eps);
        for (int i = 0; i < d; ++i) rt = std::max(rt, std::abs(back[i] - b[i]));
    }
    bool ok = worst < 1e-12 && e10 < 1e-15 && rt < 1e-12;
    return {ok, "max |CB-I| " + fmt("%.2e", worst) + ", c10/b10 error " + fmt("%.1e", e10) + ", round trip " + fmt("%.2e", rt)};
}

// ---------------------------------------------------------------- 7
Outcome scaling_law()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    std::vector<double> lens = {0.3, 0.21, 0.05, 0.05, 0.011, 0.002};
    for (int k = 0; k < 100; ++k) {
        double r = std::exp(std::log(0.01) + U(rng) * std::log(1e4));
        double t = std::exp(std::log(1e-4) + U(rng) * std::log(1e4));
        int which = k % 6;
        SetModel A = SetModel::disc(1.0), rA = A;
        int d = 2;
        switch (which) {
        case 0: A = SetModel::disc(0.7); rA = SetModel::disc(0.7 * r); break;
        case 1: A = SetModel::circle(1.3); rA = SetModel::circle(1.3 * r); break;
        case 2: A = SetModel::square_boundary(1.0); rA = SetModel::square_boundary(r); break;
        case 3: A = SetModel::parallel_segments(2.0, 0.4); rA = SetModel::parallel_segments(2.0 * r, 0.4 * r); break;
        case 4: {
            std::vector<double> sl;
            for (double x : lens) sl.push_back(x * r);
            A = SetModel::string_set(FractalString::explicit_lengths(lens));
            rA = SetModel::string_set(FractalString::explicit_lengths(sl));
            d = 1;
            break;
        }
        default: A = SetModel::sierpinski_gasket(); rA = A.scaled(r); break;
        }
        for (int i = 0; i < d; ++i) {
            double lhs = beta(rA, i, t);
            double rhs = std::pow(r, i) * beta(A, i, t / r);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
            if (lhs == 0.0 && rhs == 0.0) continue;
        }
    }
    return {worst <= 1e-12, "max relative error " + fmt("%.2e", worst) + " over 100 triples"};
}

// ---------------------------------------------------------------- 8
Outcome raster_vs_oracle()
{
    const double h = 1.0 / 512.0, pad = 0.5;
    std::ostringstream os;
    bool ok = true;
    RasterOptions opt;
    opt.h = h;
    opt.pad = pad;
    {
        auto F = distance_transform(rasterize(SetModel::disc(1.0), opt));
        double wv = 0.0, wl = 0.0;
        for (double eps = 0.05; eps <= 0.4 + 1e-12; eps += 0.025) {
            double v = parallel_volume(F, eps), ex = 2.0 * std::numbers::pi * eps + std::numbers::pi * eps * eps;
            wv = std::max(wv, std::abs(v - ex) / ex);
            double L = boundary_length(F, eps), exL = 2.0 * std::numbers::pi * (1.0 + eps);
            wl = std::max(wl, std::abs(L - exL) / exL);
        }
        ok = ok && wv <= 0.01 && wl <= 0.02;
        os << "disc volume err " << fmt("%.2e", wv) << ", length err " << fmt("%.2e", wl);
    }
    const double lens = unit_lens_area;
    auto lens_check = [&](const SetModel& m, int level, const char* name) {
        RasterOptions o = opt;
        o.gasket_level = level;
        auto F = distance_transform(rasterize(m, o));
        double worst = std::numeric_limits<double>::infinity();
        int probes = 0;
        for (double t = 10.0 * h; t + 2.0 * h <= pad; t *= 1.25) {
            auto fp = footprint_Mt(F, t);
            if (fp.cells.empty()) continue;
            long long P = packing_count(*F.grid, fp, t);
            worst = std::min(worst, parallel_volume(F, t) / (P * lens * t * t));
            ++probes;
        }
        ok = ok && worst >= 1.0 && probes > 0;
        os << "; " << name << " min V/(lens bound) " << fmt("%.3f", worst) << " at " << probes << " t";
    };
    lens_check(SetModel::disc(1.0), 0, "disc");
    lens_check(SetModel::square_boundary(1.0), 0, "square");
    lens_check(SetModel::sierpinski_gasket(), 6, "gasket6");
    return {ok, os.str()};
}

// ---------------------------------------------------------------- 9
Outcome outer_box()
{
    RasterOptions opt;
    opt.h = 1.0 / 2048.0;
    opt.pad = 0.5;
    opt.gasket_level = 7;
    SetModel m = SetModel::sierpinski_gasket();
    auto F = distance_transform(rasterize(m, opt));
    auto R = raster_dimensions(F, raster_fills_prefractal(m));
    double box = R.box, vol = R.volume;
    double D = std::log2(3.0);
    bool ok = std::abs(box - D) <= 0.05 && std::abs(box - vol) <= 0.05;
    return {ok, "box slope " + fmt("%.4f", box) + ", volume dimension " + fmt("%.4f", vol) + " over " +
                    std::to_string(R.t.size()) + " dyadic t (log2 3=" + fmt("%.4f", D) + ")"};
}

// ---------------------------------------------------------------- 10
ScalingReport fit_model(const SetModel& m, int i)
{
    SamplingPlan P = default_plan(m);
    return fit_exponent(sample_basic(m, i, sample_scales(P), P.per_period, true, P.smooth_steps), i);
}

Outcome window_dust()
{
    std::ostringstream os;
    bool ok = true;
    auto check = [&](const char* what, double got, double want, double tol) {
        bool good = std::abs(got - want) <= tol;
        ok = ok && good;
        os << what << "=" << fmt("%.4f", got) << (good ? "" : " [want " + fmt("%.4f", want) + "]") << " ";
    };
    SetModel w3 = SetModel::fractal_window(1.0 / 3.0, 10);
    check("w1/3 m0", fit_model(w3, 0).exponent, std::log(4.0) / std::log(3.0), 0.02);
    check("m1", fit_model(w3, 1).exponent, std::log(4.0) / std::log(3.0), 0.02);
    SetModel w5 = SetModel::fractal_window(0.2, 10);
    check("w1/5 m0", fit_model(w5, 0).exponent, std::log(4.0) / std::log(5.0), 0.02);
    auto r1 = fit_model(w5, 1);
    check("m1", r1.exponent, 1.0, 0.02);
    check("M1", r1.content, 20.0, 0.2);
    SetModel dust = SetModel::enclosed_dust(17.0 / 32.0, 1, 40);
    check("dust m0", fit_model(dust, 0).exponent, 96.0 / 49.0, 0.02);
    check("m1", fit_model(dust, 1).exponent, 64.0 / 49.0, 0.02);
    return {ok, os.str()};
}

// ---------------------------------------------------------------- 11
Outcome zeta_consistency()
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (auto s : {FractalString::cantor(), FractalString::svc(4.0)}) {
        for (int k = 0; k < 40; ++k) {
            cplx z(s.abscissa() + 0.05 + 2.5 * U(rng), -20.0 + 40.0 * U(rng));
            double eps = s.length(1) / 2.0 * (1.0 + 2.0 * U(rng));
            auto T = geometric_zeta(s, z, eps);
            double sc = std::max(1.0, std::abs(T.dirichlet));
            worst = std::max({worst, std::abs(T.dirichlet - T.mellin) / sc, std::abs(T.dirichlet - T.functional) / sc});
        }
    }
    cplx one = zeta_dirichlet(FractalString::cantor(), 1.0);
    bool ok = worst < 1e-8 && std::abs(one - 1.0) < 1e-12;
    return {ok, "max pairwise residual " + fmt("%.2e", worst) + ", cantor zeta(1)=" + fmt("%.15f", one.real())};
}

// ---------------------------------------------------------------- 12
Outcome svc()
{
    SetModel m = SetModel::svc(4.0);
    double e = fit_model(m, 0).exponent;
    double residual = 1.0 - m.string()->total_length();
    bool ok = std::abs(e - 0.5) <= 0.01 && residual > 0.0;
    return {ok, "m0=" + fmt("%.5f", e) + ", residual measure " + fmt("%.6f", residual)};
}

} // namespace

int main()
{
    struct Item {
        int id;
        const char* name;
        double budget;
        std::function<Outcome()> run;
    };
    std::vector<Item> items = {
        {1, "steiner 1-d exactness", 1.0, steiner_1d},
        {2, "cantor exponent and envelope", 1.0, cantor_exponent},
        {3, "cantor fourier tube formula", 5.0, cantor_fourier},
        {4, "gasket basic function", 1.0, gasket},
        {5, "exact-model contents", 1.0, exact_contents},
        {6, "matrix identities", 1.0, matrices},
        {7, "scaling law", 1.0, scaling_law},
        {8, "raster vs oracle", 60.0, raster_vs_oracle},
        {9, "outer box vs minkowski", 120.0, outer_box},
        {10, "window and dust exponents", 10.0, window_dust},
        {11, "zeta consistency", 5.0, zeta_consistency},
        {12, "svc exponent", 1.0, svc},
    };
    int failed = 0;
    for (auto& it : items) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.pass && sec <= it.budget;
        if (!pass) ++failed;
        std::printf("%s %2d %-30s %7.3fs/%gs  %s\n", pass ? "PASS" : "FAIL", it.id, it.name, sec, it.budget, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
    return failed == 0 ? 0 : 1;
}
