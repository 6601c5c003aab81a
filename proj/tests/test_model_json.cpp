#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fractal_contents/model_json.hpp"

using namespace fractal_contents;
using nlohmann::json;
using Catch::Matchers::WithinRel;

namespace {

ModelSpec parse(const char* text) { return parse_model(json::parse(text)); }

} // namespace

TEST_CASE("every analytic kind parses")
{
    CHECK(parse(R"({"kind": "disc", "radius": 2})").model->kind() == ModelKind::disc);
    CHECK(parse(R"({"kind": "circle", "radius": 1})").model->kind() == ModelKind::circle);
    CHECK(parse(R"({"kind": "square_boundary", "side": 1})").model->kind() == ModelKind::square_boundary);
    CHECK(parse(R"({"kind": "parallel_segments", "length": 1, "gap": 0.2})").model->kind() == ModelKind::parallel_segments);
    CHECK(parse(R"({"kind": "sierpinski_gasket"})").model->kind() == ModelKind::sierpinski_gasket);
    CHECK(parse(R"({"kind": "cantor"})").model->kind() == ModelKind::cantor_ternary);
    CHECK(parse(R"({"kind": "svc", "a": 5})").model->kind() == ModelKind::svc);
    auto w = parse(R"({"kind": "fractal_window", "r": 0.2, "level": 8})");
    CHECK(w.model->kind() == ModelKind::fractal_window);
    CHECK(w.model->level() == 8);
    CHECK(parse(R"({"kind": "enclosed_dust", "alpha": 0.55, "m": 1, "level": 30})").model->kind() == ModelKind::enclosed_dust);
}

TEST_CASE("string kinds")
{
    auto e = parse(R"({"kind": "string", "lengths": [0.5, 0.25, 0.25]})");
    CHECK(e.model->string()->is_finite());
    CHECK(e.model->string()->total_length() == 1.0);
    auto g = parse(R"({"kind": "string", "rule": "geometric", "ratio": 0.3, "multiplicity": 2})");
    CHECK_THAT(g.model->string()->total_length(), WithinRel(0.75, 1e-14));
    auto s = parse(R"({"kind": "string", "rule": "svc", "a": 4})");
    CHECK_THAT(s.model->string()->total_length(), WithinRel(0.5, 1e-14));
    CHECK(parse(R"({"kind": "string", "rule": "cantor"})").model->string()->ratio() == 1.0 / 3.0);
}

TEST_CASE("scale and raster level")
{
    auto d = parse(R"({"kind": "disc", "radius": 1, "scale": 0.5, "raster_level": 4})");
    CHECK(d.raster_level == 4);
    CHECK_THAT(beta(*d.model, 1, 0.1), WithinRel(std::numbers::pi * 0.5, 1e-14));
}

TEST_CASE("shapes lists")
{
    auto s = parse(R"({"kind": "shapes", "points": [[0, 0]], "segments": [[[0, 1], [1, 1]]],
                      "polygons": [[[2, 0], [3, 0], [2.5, 1]]], "discs": [{"x": 5, "y": 0, "radius": 0.5}],
                      "circles": [{"x": 8, "y": 0, "radius": 0.5}]})");
    CHECK_FALSE(s.model.has_value());
    CHECK(s.shapes.size() == 5);
    auto g = rasterize_spec(s, RasterOptions{0.05, 0.2});
    CHECK(g.occupied_count() > 0);
}

TEST_CASE("malformed models are rejected")
{
    CHECK_THROWS_AS(parse(R"([1, 2])"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"radius": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "torus"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "disc"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "disc", "radius": "big"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "disc", "radius": -1})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "svc", "a": 2})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "fractal_window", "r": 0.2, "level": 2.5})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "enclosed_dust", "alpha": 0.55, "m": 1, "level": 100000000})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "string"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "shapes"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "shapes", "points": [[0]]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "shapes", "points": [[0, 0]], "scale": 2})"), std::invalid_argument);
    CHECK_THROWS_AS(parse(R"({"kind": "disc", "radius": 1, "scale": 0})"), std::invalid_argument);
}

TEST_CASE("model files")
{
    auto dir = std::filesystem::temp_directory_path() / "fractal_contents_json_test";
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const char* text) {
        std::ofstream((dir / name).string()) << text;
        return (dir / name).string();
    };
    CHECK_THROWS_AS(load_model(write("empty.json", "  \n")), std::invalid_argument);
    CHECK_THROWS_AS(load_model(write("broken.json", "{\"kind\": ")), std::invalid_argument);
    CHECK_THROWS_AS(load_model((dir / "absent.json").string()), std::invalid_argument);
    CHECK(load_model(write("ok.json", R"({"kind": "cantor"})")).model.has_value());
    std::filesystem::remove_all(dir);
}

TEST_CASE("shipped example models all load")
{
    int n = 0;
    for (auto& e : std::filesystem::directory_iterator(EXAMPLES_DIR)) {
        if (e.path().extension() != ".json") continue;
        INFO(e.path().string());
        CHECK_NOTHROW(load_model(e.path().string()));
        ++n;
    }
    CHECK(n >= 10);
}

TEST_CASE("real formatting")
{
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_real(NAN) == "nan");
    CHECK(format_real(INFINITY) == "inf");
    CHECK(format_real(-INFINITY) == "-inf");
    CHECK(real_json(-INFINITY) == "-inf");
    CHECK(real_json(2.5) == 2.5);
}

TEST_CASE("dimension report JSON and sample CSV")
{
    auto R = dimension_report(SetModel::cantor());
    auto j = to_json(R);
    CHECK(j["schema_version"] == report_schema_version);
    CHECK(j["model"] == "cantor");
    CHECK(j["basic"].size() == 1);
    CHECK(j["dim_box"].is_null());
    CHECK(j["warnings"].is_array());
    auto csv = samples_csv(R);
    CHECK(csv.rfind("# schema_version=1\nt,beta_0,beta_1,mu_0,mu_1,volume\n", 0) == 0);
    // one-dimensional rows leave the index-1 columns empty
    auto second = csv.find('\n', csv.find('\n') + 1) + 1;
    auto row = csv.substr(second, csv.find('\n', second) - second);
    CHECK(row.find(",,") != std::string::npos);
    // reports are reproducible
    CHECK(to_json(dimension_report(SetModel::cantor())).dump() == j.dump());
}

TEST_CASE("reports CSV")
{
    auto R = dimension_report(SetModel::disc(1.0));
    auto csv = reports_csv({{"basic", R.basic[0]}, {"basic", R.basic[1]}, {"volume", R.volume}});
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 5);
    CHECK(csv.find("volume,2,") != std::string::npos);
}
