#pragma once

// Model descriptions and report serialisation (needs nlohmann/json, vendored as json.hpp).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "estimators.hpp"
#include "raster2d.hpp"
#include "set_models.hpp"

namespace fractal_contents {

inline constexpr int report_schema_version = 1;

/** Parsed model file: an analytic model, or a list of planar shapes for rasterising only. */
struct ModelSpec {
    std::optional<SetModel> model;
    std::vector<Primitive> shapes;
    int raster_level = -1; // prefractal depth used when rasterising, -1 for the default
    std::string name;
};

namespace detail {

using nlohmann::json;

inline double num(const json& j, const char* key)
{
    if (!j.contains(key)) throw std::invalid_argument(std::string("model: missing \"") + key + "\"");
    if (!j.at(key).is_number()) throw std::invalid_argument(std::string("model: \"") + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline double num_or(const json& j, const char* key, double fallback) { return j.contains(key) ? num(j, key) : fallback; }

inline long whole(const json& j, const char* key)
{
    double v = num(j, key);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw std::invalid_argument(std::string("model: \"") + key + "\" must be an integer");
    return static_cast<long>(v);
}

inline std::pair<double, double> point_of(const json& p)
{
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw std::invalid_argument("model: points are [x, y] pairs");
    return {p[0].get<double>(), p[1].get<double>()};
}

inline std::vector<Primitive> parse_shapes(const json& j)
{
    std::vector<Primitive> out;
    if (j.contains("points"))
        for (auto& p : j.at("points")) {
            auto [x, y] = point_of(p);
            out.push_back(Point{x, y});
        }
    if (j.contains("segments"))
        for (auto& s : j.at("segments")) {
            if (!s.is_array() || s.size() != 2) throw std::invalid_argument("model: segments are [[x0, y0], [x1, y1]]");
            auto a = point_of(s[0]), b = point_of(s[1]);
            out.push_back(Segment{a.first, a.second, b.first, b.second});
        }
    if (j.contains("polygons"))
        for (auto& poly : j.at("polygons")) {
            if (!poly.is_array() || poly.size() < 3) throw std::invalid_argument("model: polygons need at least three vertices");
            FilledPolygon fp;
            for (auto& p : poly) {
                auto [x, y] = point_of(p);
                fp.x.push_back(x);
                fp.y.push_back(y);
            }
            out.push_back(fp);
        }
    if (j.contains("discs"))
        for (auto& d : j.at("discs")) out.push_back(FilledDisc{num(d, "x"), num(d, "y"), num(d, "radius")});
    if (j.contains("circles"))
        for (auto& d : j.at("circles")) out.push_back(CircleCurve{num(d, "x"), num(d, "y"), num(d, "radius")});
    if (out.empty()) throw std::invalid_argument("model: shapes list is empty");
    return out;
}

inline FractalString parse_string(const json& j)
{
    if (j.contains("lengths")) {
        std::vector<double> l;
        for (auto& v : j.at("lengths")) {
            if (!v.is_number()) throw std::invalid_argument("model: lengths must be numbers");
            l.push_back(v.get<double>());
        }
        return FractalString::explicit_lengths(l);
    }
    std::string rule = j.value("rule", "");
    if (rule == "cantor") return FractalString::cantor();
    if (rule == "svc") return FractalString::svc(num(j, "a"));
    if (rule == "geometric") return FractalString::geometric(num(j, "ratio"), num_or(j, "multiplicity", 1.0));
    throw std::invalid_argument("model: string needs \"lengths\" or a \"rule\" of cantor, svc, geometric");
}

} // namespace detail

/** Build a model from its JSON description; std::invalid_argument on malformed input. */
inline ModelSpec parse_model(const nlohmann::json& j)
{
    using detail::num;
    if (!j.is_object()) throw std::invalid_argument("model: expected a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw std::invalid_argument("model: missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    ModelSpec spec;
    spec.name = kind;
    try {
        if (kind == "disc") spec.model = SetModel::disc(num(j, "radius"));
        else if (kind == "circle") spec.model = SetModel::circle(num(j, "radius"));
        else if (kind == "square_boundary") spec.model = SetModel::square_boundary(num(j, "side"));
        else if (kind == "parallel_segments") spec.model = SetModel::parallel_segments(num(j, "length"), num(j, "gap"));
        else if (kind == "sierpinski_gasket") spec.model = SetModel::sierpinski_gasket();
        else if (kind == "cantor") spec.model = SetModel::cantor();
        else if (kind == "svc") spec.model = SetModel::svc(num(j, "a"));
        else if (kind == "fractal_window") spec.model = SetModel::fractal_window(num(j, "r"), detail::whole(j, "level"));
        else if (kind == "enclosed_dust")
            spec.model = SetModel::enclosed_dust(num(j, "alpha"), static_cast<int>(detail::whole(j, "m")), detail::whole(j, "level"));
        else if (kind == "string") spec.model = SetModel::string_set(detail::parse_string(j));
        else if (kind == "shapes") spec.shapes = detail::parse_shapes(j);
        else throw std::invalid_argument("model: unknown kind \"" + kind + "\"");
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("model: ") + e.what());
    } catch (const generation_error& e) {
        throw std::invalid_argument(std::string("model: ") + e.what());
    }
    if (j.contains("scale")) {
        double s = num(j, "scale");
        if (!spec.model) throw std::invalid_argument("model: \"scale\" applies to analytic kinds only");
        if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("model: \"scale\" must be positive");
        spec.model = spec.model->scaled(s);
    }
    if (j.contains("raster_level")) spec.raster_level = static_cast<int>(detail::whole(j, "raster_level"));
    return spec;
}

inline ModelSpec load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos) throw std::invalid_argument("model file " + path + " is empty");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("model file " + path + ": " + e.what());
    }
    return parse_model(j);
}

/** Grid for a spec: shapes as given, analytic models through model_primitives. */
inline GridSet rasterize_spec(const ModelSpec& spec, RasterOptions opt)
{
    if (spec.raster_level >= 0) {
        opt.gasket_level = spec.raster_level;
        opt.window_level = spec.raster_level;
    }
    if (spec.model) return rasterize(*spec.model, opt);
    return rasterize(spec.shapes, opt.h, opt.pad, opt.max_cells);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/** Fixed 17 significant digits; non-finite values as nan, inf, -inf. */
inline std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json real_json(double v)
{
    if (std::isfinite(v)) return v;
    return format_real(v);
}

inline nlohmann::json to_json(const ScalingReport& r)
{
    nlohmann::json j;
    j["index"] = r.index;
    j["exponent"] = real_json(r.exponent);
    j["lower_exponent"] = real_json(r.lower_exponent);
    j["upper_exponent"] = real_json(r.upper_exponent);
    j["content"] = real_json(r.content);
    j["lower_content"] = real_json(r.lower_content);
    j["upper_content"] = real_json(r.upper_content);
    j["method"] = fit_method_name(r.method);
    j["fit"] = {{"slope", real_json(r.fit.slope)}, {"intercept", real_json(r.fit.intercept)}, {"residual", real_json(r.fit.residual)}};
    j["oscillation_flag"] = r.oscillation_flag;
    j["sign_change"] = r.sign_change;
    j["low_confidence"] = r.low_confidence;
    j["samples"] = r.samples;
    j["decades"] = real_json(r.decades);
    return j;
}

inline nlohmann::json to_json(const DimensionReport& R)
{
    nlohmann::json j;
    j["schema_version"] = report_schema_version;
    j["model"] = R.model;
    j["dim"] = R.dim;
    for (auto& b : R.basic) j["basic"].push_back(to_json(b));
    for (auto& s : R.support) j["support"].push_back(to_json(s));
    j["volume"] = to_json(R.volume);
    j["dim_minkowski"] = real_json(R.dim_minkowski);
    j["max_basic_exponent"] = real_json(R.max_basic);
    j["dim_box"] = R.dim_box ? real_json(*R.dim_box) : nlohmann::json(nullptr);
    j["dim_raster_volume"] = R.dim_raster_volume ? real_json(*R.dim_raster_volume) : nlohmann::json(nullptr);
    j["minkowski_content_assembled"] = real_json(R.minkowski_content_assembled);
    j["tolerance"] = R.tolerance;
    j["discrepancies"] = R.discrepancies;
    j["warnings"] = nlohmann::json::array();
    for (auto& b : R.basic)
        if (b.low_confidence) j["warnings"].push_back("low confidence fit for beta_" + std::to_string(b.index));
    return j;
}

/** t, beta_0, beta_1, mu_0, mu_1, volume; one-dimensional models leave the index-1 columns empty. */
inline std::string samples_csv(const DimensionReport& R)
{
    std::ostringstream os;
    os << "# schema_version=" << report_schema_version << "\n";
    os << "t,beta_0,beta_1,mu_0,mu_1,volume\n";
    for (std::size_t k = 0; k < R.t.size(); ++k) {
        os << format_real(R.t[k]);
        for (int i = 0; i < 2; ++i) os << ',' << (i < R.dim ? format_real(R.beta_samples[i][k]) : "");
        for (int i = 0; i < 2; ++i) os << ',' << (i < R.dim ? format_real(R.mu_samples[i][k]) : "");
        os << ',' << format_real(R.volume_samples[k]) << '\n';
    }
    return os.str();
}

/** One row per (quantity label, report). */
inline std::string reports_csv(const std::vector<std::pair<std::string, ScalingReport>>& reps)
{
    std::ostringstream os;
    os << "# schema_version=" << report_schema_version << "\n";
    os << "quantity,index,exponent,lower_exponent,upper_exponent,content,lower_content,upper_content,method,oscillation,low_confidence\n";
    for (auto& [label, r] : reps)
        os << label << ',' << r.index << ',' << format_real(r.exponent) << ',' << format_real(r.lower_exponent) << ','
           << format_real(r.upper_exponent) << ',' << format_real(r.content) << ',' << format_real(r.lower_content) << ','
           << format_real(r.upper_content) << ',' << fit_method_name(r.method) << ',' << (r.oscillation_flag ? 1 : 0) << ','
           << (r.low_confidence ? 1 : 0) << '\n';
    return os.str();
}

} // namespace fractal_contents
