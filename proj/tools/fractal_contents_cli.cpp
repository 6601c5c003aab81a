// fractal-contents: command line front end.
//
// Exit codes: 0 success, 1 an identity check failed, 2 bad input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fractal_contents.hpp"
#include "fractal_contents/model_json.hpp"
#include "fractal_contents/raster_io.hpp"

using namespace fractal_contents;
using nlohmann::json;

namespace {

struct JobConfig {
    std::string command;
    std::string model_path;
    std::optional<double> t_max;
    std::optional<double> ratio;
    std::optional<int> count;
    std::optional<double> h;
    double pad = 0.5;
    std::string suite = "all";
    std::string out;
    std::string format = "json";
    unsigned long long seed = 0;
    int dmax = 8;
    std::string s_list;
    std::optional<double> eps;
    std::optional<int> index;
};

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void validate(const JobConfig& c)
{
    if (c.ratio && !(*c.ratio > 0.0 && *c.ratio < 1.0)) throw InputError("--ratio must lie in (0,1)");
    if (c.count && *c.count < 1) throw InputError("--count must be >= 1");
    if (c.h && !(*c.h > 0.0)) throw InputError("--h must be positive");
    if (!(c.pad > 0.0)) throw InputError("--pad must be positive");
    if (c.t_max && !(*c.t_max > 0.0)) throw InputError("--tmax must be positive");
    if (c.format != "json" && c.format != "csv") throw InputError("--format is json or csv");
    if (c.dmax < 2 || c.dmax > 16) throw InputError("--dmax must lie in 2..16");
    if (c.eps && !(*c.eps > 0.0)) throw InputError("--eps must be positive");
}

ModelSpec require_model(const JobConfig& c)
{
    if (c.model_path.empty()) throw InputError(c.command + " needs --model");
    return load_model(c.model_path);
}

SetModel require_analytic(const JobConfig& c)
{
    auto spec = require_model(c);
    if (!spec.model) throw InputError(c.command + " needs an analytic model kind, not a shapes list");
    return *spec.model;
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

std::string stem_of(const std::string& path)
{
    auto slash = path.find_last_of('/');
    auto dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return path.substr(0, dot);
    return path;
}

SamplingPlan plan_for(const JobConfig& c, const SetModel& m)
{
    SamplingPlan P = default_plan(m);
    if (c.t_max) P.t_top = *c.t_max;
    if (c.ratio) {
        P.ratio = *c.ratio;
        P.per_period = 1;
    }
    if (c.count) {
        P.periods = (*c.count - 1 + P.per_period - 1) / P.per_period;
        P.t_floor = 0.0;
    }
    return P;
}

RasterOptions raster_options(const JobConfig& c)
{
    RasterOptions o;
    o.h = c.h ? *c.h : 1.0 / 512.0;
    o.pad = c.pad;
    return o;
}

// ---------------------------------------------------------------- analyze

int run_analyze(const JobConfig& c)
{
    SetModel m = require_analytic(c);
    SamplingPlan P = plan_for(c, m);
    DimensionReport R = dimension_report(m, P);
    json warnings = json::array();
    if (c.h && m.dim() == 2) {
        try {
            auto spec = require_model(c);
            auto F = distance_transform(rasterize_spec(spec, raster_options(c)));
            auto D = raster_dimensions(F, raster_fills_prefractal(m));
            R.dim_box = D.box;
            R.dim_raster_volume = D.volume;
            check_dimension_consistency(R);
        } catch (const resolution_error& e) {
            warnings.push_back(e.what());
        } catch (const std::domain_error& e) {
            warnings.push_back(e.what());
        }
    }
    std::string report;
    if (c.format == "json") {
        json j = to_json(R);
        for (auto& w : warnings) j["warnings"].push_back(w);
        report = j.dump(2) + "\n";
    } else {
        std::vector<std::pair<std::string, ScalingReport>> rows;
        for (auto& b : R.basic) rows.push_back({"basic", b});
        for (auto& b : R.support) rows.push_back({"support", b});
        rows.push_back({"volume", R.volume});
        report = reports_csv(rows);
    }
    emit(report, c.out);
    if (!c.out.empty()) emit(samples_csv(R), stem_of(c.out) + ".samples.csv");
    return 0;
}

// ---------------------------------------------------------------- estimate

int run_estimate(const JobConfig& c)
{
    SetModel m = require_analytic(c);
    SamplingPlan P = plan_for(c, m);
    auto t = sample_scales(P);
    if (t.size() < 2) throw InputError("sampling plan yields fewer than two scales");
    std::vector<std::pair<std::string, ScalingReport>> reps;
    for (int i = 0; i < m.dim(); ++i) {
        if (c.index && *c.index != i) continue;
        reps.push_back({"basic", fit_exponent(sample_basic(m, i, t, P.per_period, true, P.smooth_steps), i)});
    }
    if (reps.empty()) throw InputError("--index out of range for this model");
    if (c.format == "json") {
        json j;
        j["schema_version"] = report_schema_version;
        j["model"] = model_kind_name(m.kind());
        j["basic"] = json::array();
        for (auto& r : reps) j["basic"].push_back(to_json(r.second));
        emit(j.dump(2) + "\n", c.out);
    } else {
        emit(reports_csv(reps), c.out);
    }
    return 0;
}

// ---------------------------------------------------------------- zeta

cplx parse_complex(const std::string& text)
{
    std::string s;
    for (char ch : text)
        if (ch != ' ') s += ch;
    if (s.empty()) throw InputError("empty s value");
    try {
        if (s.back() == 'i') {
            std::string body = s.substr(0, s.size() - 1);
            std::size_t split = std::string::npos;
            for (std::size_t k = body.size(); k-- > 1;)
                if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                    split = k;
                    break;
                }
            if (split == std::string::npos) {
                std::string im = body.empty() || body == "+" || body == "-" ? body + "1" : body;
                return {0.0, std::stod(im)};
            }
            std::string im = body.substr(split);
            if (im == "+" || im == "-") im += "1";
            return {std::stod(body.substr(0, split)), std::stod(im)};
        }
        std::size_t used = 0;
        double re = std::stod(s, &used);
        if (used != s.size()) throw InputError("cannot parse s value " + text);
        return {re, 0.0};
    } catch (const std::logic_error&) {
        throw InputError("cannot parse s value " + text);
    }
}

std::vector<cplx> parse_s_list(const std::string& list)
{
    std::vector<cplx> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
    if (out.empty()) throw InputError("--s needs at least one value");
    return out;
}

int run_zeta(const JobConfig& c)
{
    SetModel m = require_analytic(c);
    std::vector<cplx> svals;
    if (!c.s_list.empty()) svals = parse_s_list(c.s_list);
    else
        for (int k = 0; k < 8; ++k) svals.push_back(cplx(1.0 + 0.25 * k, 0.0));
    std::ostringstream os;
    json rows = json::array();
    auto cell = [](cplx z) { return format_real(z.real()) + "," + format_real(z.imag()); };
    if (m.dim() == 1) {
        const FractalString& s = *m.string();
        double eps = c.eps ? *c.eps : s.length(1) / 2.0;
        os << "# schema_version=" << report_schema_version << "\n";
        os << "s_re,s_im,dirichlet_re,dirichlet_im,mellin_re,mellin_im,functional_re,functional_im,max_residual,status\n";
        for (cplx z : svals) {
            json row = {{"s", {z.real(), z.imag()}}};
            os << cell(z) << ',';
            try {
                auto T = geometric_zeta(s, z, eps);
                double res = std::max({std::abs(T.dirichlet - T.mellin), std::abs(T.dirichlet - T.functional), std::abs(T.mellin - T.functional)});
                os << cell(T.dirichlet) << ',' << cell(T.mellin) << ',' << cell(T.functional) << ',' << format_real(res) << ",ok\n";
                row["dirichlet"] = {T.dirichlet.real(), T.dirichlet.imag()};
                row["mellin"] = {T.mellin.real(), T.mellin.imag()};
                row["functional"] = {T.functional.real(), T.functional.imag()};
                row["max_residual"] = res;
                row["status"] = "ok";
            } catch (const divergence_error&) {
                os << ",,,,,,,divergent\n";
                row["status"] = "divergent";
            }
            rows.push_back(row);
        }
    } else {
        double eps = c.eps ? *c.eps : default_plan(m).t_top;
        auto profiles = model_profiles(m, eps);
        os << "# schema_version=" << report_schema_version << "\n";
        os << "s_re,s_im";
        for (std::size_t i = 0; i < profiles.size(); ++i) os << ",basic_" << i << "_re,basic_" << i << "_im";
        os << ",distance_re,distance_im,status\n";
        for (cplx z : svals) {
            json row = {{"s", {z.real(), z.imag()}}};
            os << cell(z);
            try {
                std::vector<cplx> b;
                for (auto& p : profiles) b.push_back(basic_zeta_any(p, z, eps));
                cplx dz = distance_zeta_from_basic(profiles, z, eps);
                for (std::size_t i = 0; i < b.size(); ++i) {
                    os << ',' << cell(b[i]);
                    row["basic"].push_back({b[i].real(), b[i].imag()});
                }
                os << ',' << cell(dz) << ",ok\n";
                row["distance"] = {dz.real(), dz.imag()};
                row["status"] = "ok";
            } catch (const divergence_error&) {
                for (std::size_t i = 0; i <= profiles.size(); ++i) os << ",,";
                os << "divergent\n";
                row["status"] = "divergent";
            }
            rows.push_back(row);
        }
    }
    if (c.format == "json") {
        json j = {{"schema_version", report_schema_version}, {"model", model_kind_name(m.kind())}, {"rows", rows}};
        emit(j.dump(2) + "\n", c.out);
    } else {
        emit(os.str(), c.out);
    }
    return 0;
}

// ---------------------------------------------------------------- raster

int run_raster(const JobConfig& c)
{
    auto spec = require_model(c);
    RasterOptions opt = raster_options(c);
    GridSet g = rasterize_spec(spec, opt);
    auto F = distance_transform(g);
    std::ostringstream os;
    os << "# schema_version=" << report_schema_version << "\n";
    os << "t,parallel_volume,parallel_set_area,boundary_length,footprint_cells,theta,theta_packing\n";
    json rows = json::array();
    for (double t = 10.0 * opt.h; t + 2.0 * opt.h <= opt.pad * (1.0 + 1e-12); t *= 1.5) {
        auto fp = footprint_Mt(F, t);
        double L = std::numeric_limits<double>::quiet_NaN();
        try {
            L = boundary_length(F, t);
        } catch (const std::domain_error&) {
        }
        long long th = 0, tp = 0;
        if (!fp.cells.empty()) {
            auto cp = covering_packing_counts(*F.grid, fp, t);
            th = cp.theta;
            tp = cp.theta_packing;
        }
        os << format_real(t) << ',' << format_real(parallel_volume(F, t)) << ',' << format_real(parallel_set_area(F, t)) << ','
           << format_real(L) << ',' << fp.cells.size() << ',' << th << ',' << tp << '\n';
        rows.push_back({{"t", t},
                        {"parallel_volume", parallel_volume(F, t)},
                        {"parallel_set_area", parallel_set_area(F, t)},
                        {"boundary_length", std::isfinite(L) ? json(L) : json(nullptr)},
                        {"footprint_cells", fp.cells.size()},
                        {"theta", th},
                        {"theta_packing", tp}});
    }
    if (rows.empty())
        throw std::invalid_argument("no probe scale fits: need 12 h <= pad (h = " + format_real(opt.h) + ", pad = " +
                                    format_real(opt.pad) + ")");
    if (!c.out.empty()) {
        std::string stem = stem_of(c.out);
        write_pgm(g, stem + ".pgm");
        write_distance_raw(F, stem + ".dist.f32");
    }
    if (c.format == "json") {
        json j = {{"schema_version", report_schema_version},
                  {"model", spec.name},
                  {"h", g.h},
                  {"origin", {g.origin_x, g.origin_y}},
                  {"extent", {g.nx, g.ny}},
                  {"occupied_cells", g.occupied_count()},
                  {"rows", rows}};
        emit(j.dump(2) + "\n", c.out);
    } else {
        emit(os.str(), c.out);
    }
    return 0;
}

// ---------------------------------------------------------------- verify

struct SuiteResult {
    std::string name;
    long checks = 0;
    json failures = json::array();

    void check(bool ok, const json& what)
    {
        ++checks;
        if (!ok && failures.size() < 50) failures.push_back(what);
        if (!ok) ++failed;
    }
    long failed = 0;
};

SuiteResult suite_steiner1d(unsigned long long seed)
{
    SuiteResult r{"steiner1d"};
    std::vector<std::pair<std::string, FractalString>> strings = {{"cantor", FractalString::cantor()},
                                                                  {"svc4", FractalString::svc(4.0)},
                                                                  {"svc5", FractalString::svc(5.0)},
                                                                  {"svc10", FractalString::svc(10.0)},
                                                                  {"geometric", FractalString::geometric(0.3, 2.0)}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> l(1 + static_cast<int>(U(rng) * 60));
        for (auto& x : l) x = std::exp(std::log(1e-5) * U(rng));
        strings.push_back({"random" + std::to_string(k), FractalString::explicit_lengths(l)});
    }
    for (auto& [name, s] : strings)
        for (int k = 0; k < 50; ++k) {
            double eps = std::max(1.0, s.length(1)) * std::exp(std::log(1e-7) * U(rng));
            auto tv = tube_volume_1d(s, eps);
            double err = std::abs(tv.steiner - tv.direct) / (1.0 + std::abs(tv.direct));
            r.check(err < 1e-12, {{"string", name}, {"eps", eps}, {"relative_gap", err}});
        }
    return r;
}

SuiteResult suite_matrices(int dmax)
{
    SuiteResult r{"matrices"};
    for (int d = 2; d <= dmax; ++d) {
        try {
            SteinerCoefficients co(d);
            double e = max_abs_diff(co.C * co.B, Matrix::identity(d));
            double e2 = max_abs_diff(co.B * co.C, Matrix::identity(d));
            r.check(std::max(e, e2) < 1e-12, {{"d", d}, {"max_abs_error", std::max(e, e2)}});
        } catch (const consistency_error& ex) {
            r.check(false, {{"d", d}, {"error", ex.what()}});
        }
    }
    return r;
}

SuiteResult suite_roundtrip(int dmax, unsigned long long seed)
{
    SuiteResult r{"roundtrip"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0), E(0.05, 1.0);
    std::uniform_int_distribution<int> D(2, dmax);
    for (int k = 0; k < 1000; ++k) {
        int d = D(rng);
        SteinerCoefficients co(d);
        std::vector<double> b(d);
        for (auto& x : b) x = U(rng);
        double eps = E(rng);
        auto back = basic_from_support(support_masses(b, co, eps), co, eps);
        double err = 0.0;
        for (int i = 0; i < d; ++i) err = std::max(err, std::abs(back[i] - b[i]));
        r.check(err < 1e-12, {{"d", d}, {"eps", eps}, {"max_abs_error", err}});
    }
    return r;
}

SuiteResult suite_zeta(unsigned long long seed)
{
    SuiteResult r{"zeta"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::pair<std::string, FractalString>> strings = {{"cantor", FractalString::cantor()}, {"svc4", FractalString::svc(4.0)}};
    for (auto& [name, s] : strings)
        for (int k = 0; k < 40; ++k) {
            cplx z(s.abscissa() + 0.05 + 2.5 * U(rng), -20.0 + 40.0 * U(rng));
            double eps = s.length(1) / 2.0 * (1.0 + 2.0 * U(rng));
            auto T = geometric_zeta(s, z, eps);
            double sc = std::max(1.0, std::abs(T.dirichlet));
            double res = std::max(std::abs(T.dirichlet - T.mellin), std::abs(T.dirichlet - T.functional)) / sc;
            r.check(res < 1e-8, {{"string", name}, {"s", {z.real(), z.imag()}}, {"residual", res}});
        }
    double one = zeta_dirichlet(FractalString::cantor(), 1.0).real();
    r.check(std::abs(one - 1.0) < 1e-12, {{"cantor_zeta_1", one}});
    return r;
}

DistanceField field_for(const JobConfig& c)
{
    ModelSpec spec;
    if (c.model_path.empty()) {
        spec.model = SetModel::sierpinski_gasket();
        spec.raster_level = 6;
    } else {
        spec = load_model(c.model_path);
    }
    return distance_transform(rasterize_spec(spec, raster_options(c)));
}

SuiteResult suite_theta(const DistanceField& F)
{
    SuiteResult r{"theta"};
    const double h = F.h();
    for (double t = 2.0 * h; t + 2.0 * h <= F.grid->pad * (1.0 + 1e-12); t *= 1.25) {
        auto fp = footprint_Mt(F, t);
        if (fp.cells.empty()) continue;
        long long c4 = covering_count(*F.grid, fp, 4.0 * t);
        long long p = packing_count(*F.grid, fp, t);
        long long c1 = covering_count(*F.grid, fp, t);
        r.check(c4 <= p && p <= c1, {{"t", t}, {"theta_4t", c4}, {"theta_packing", p}, {"theta", c1}});
    }
    return r;
}

SuiteResult suite_lens(const DistanceField& F)
{
    SuiteResult r{"lens"};
    const double h = F.h();
    for (double t = 10.0 * h; t + 2.0 * h <= F.grid->pad * (1.0 + 1e-12); t *= 1.25) {
        auto fp = footprint_Mt(F, t);
        if (fp.cells.empty()) continue;
        long long p = packing_count(*F.grid, fp, t);
        double v = parallel_volume(F, t), bound = p * unit_lens_area * t * t;
        r.check(v >= bound, {{"t", t}, {"volume", v}, {"lens_bound", bound}});
    }
    return r;
}

int run_verify(const JobConfig& c)
{
    std::vector<std::string> names;
    if (c.suite == "all") names = {"steiner1d", "matrices", "roundtrip", "zeta", "theta", "lens"};
    else names = {c.suite};
    std::vector<SuiteResult> results;
    std::optional<DistanceField> F;
    for (auto& n : names) {
        if (n == "steiner1d") results.push_back(suite_steiner1d(c.seed));
        else if (n == "matrices") results.push_back(suite_matrices(c.dmax));
        else if (n == "roundtrip") results.push_back(suite_roundtrip(c.dmax, c.seed));
        else if (n == "zeta") results.push_back(suite_zeta(c.seed));
        else if (n == "theta" || n == "lens") {
            if (!F) F = field_for(c);
            results.push_back(n == "theta" ? suite_theta(*F) : suite_lens(*F));
        } else
            throw InputError("unknown suite " + n + " (steiner1d, matrices, roundtrip, zeta, theta, lens, all)");
    }
    bool ok = true;
    json j = {{"schema_version", report_schema_version}, {"suites", json::array()}};
    std::ostringstream os;
    os << "# schema_version=" << report_schema_version << "\nsuite,checks,failed,passed\n";
    for (auto& r : results) {
        ok = ok && r.failed == 0;
        j["suites"].push_back({{"suite", r.name}, {"checks", r.checks}, {"failed", r.failed}, {"passed", r.failed == 0}, {"failures", r.failures}});
        os << r.name << ',' << r.checks << ',' << r.failed << ',' << (r.failed == 0 ? "pass" : "fail") << '\n';
    }
    j["passed"] = ok;
    emit(c.format == "json" ? j.dump(2) + "\n" : os.str(), c.out);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Basic functions, support measures and fractal contents of model sets"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    JobConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", cfg.model_path, "model JSON file");
        sub->add_option("--out", cfg.out, "output file (stdout when absent)");
        sub->add_option("--format", cfg.format, "json or csv");
        sub->add_option("--seed", cfg.seed, "seed for randomised checks");
    };
    auto add_scales = [&](CLI::App* sub) {
        sub->add_option("--tmax", cfg.t_max, "largest sampled scale");
        sub->add_option("--ratio", cfg.ratio, "geometric sampling ratio in (0,1)");
        sub->add_option("--count", cfg.count, "number of sampled scales");
    };
    auto add_raster = [&](CLI::App* sub) {
        sub->add_option("--h", cfg.h, "raster cell size");
        sub->add_option("--pad", cfg.pad, "raster padding around the model");
    };

    auto* analyze = app.add_subcommand("analyze", "dimension report and sample table");
    add_common(analyze);
    add_scales(analyze);
    add_raster(analyze);
    auto* verify = app.add_subcommand("verify", "identity suites");
    add_common(verify);
    add_raster(verify);
    verify->add_option("--suite", cfg.suite, "steiner1d, matrices, roundtrip, zeta, theta, lens or all");
    verify->add_option("--dmax", cfg.dmax, "largest ambient dimension for matrix suites");
    auto* estimate = app.add_subcommand("estimate", "scaling exponents of the basic functions");
    add_common(estimate);
    add_scales(estimate);
    estimate->add_option("--index", cfg.index, "only this index");
    auto* zeta = app.add_subcommand("zeta", "geometric or basic zeta functions");
    add_common(zeta);
    zeta->add_option("--s", cfg.s_list, "comma separated values such as 1,0.8+3i");
    zeta->add_option("--eps", cfg.eps, "upper integration limit");
    auto* raster = app.add_subcommand("raster", "rasterise a model and tabulate grid quantities");
    add_common(raster);
    add_raster(raster);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        validate(cfg);
        if (cfg.command == "analyze") return run_analyze(cfg);
        if (cfg.command == "verify") return run_verify(cfg);
        if (cfg.command == "estimate") return run_estimate(cfg);
        if (cfg.command == "zeta") return run_zeta(cfg);
        if (cfg.command == "raster") return run_raster(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
