#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "fractal_contents/estimators.hpp"
#include "fractal_contents/raster_io.hpp"

using namespace fractal_contents;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

constexpr double pi = std::numbers::pi;

namespace {

GridSet blank(int nx, int ny, double h = 1.0)
{
    GridSet g;
    g.h = h;
    g.nx = nx;
    g.ny = ny;
    g.pad = 0.0;
    g.occupancy.assign(static_cast<std::size_t>(nx) * ny, 0);
    return g;
}

DistanceField field(const std::vector<Primitive>& prims, double h, double pad)
{
    return distance_transform(rasterize(prims, h, pad));
}

DistanceField field(const SetModel& m, double h, int level = 7)
{
    RasterOptions o;
    o.h = h;
    o.gasket_level = level;
    return distance_transform(rasterize(m, o));
}

std::set<std::uint32_t> boundary_cells(const GridSet& g)
{
    std::set<std::uint32_t> out;
    for (int j = 1; j + 1 < g.ny; ++j)
        for (int i = 1; i + 1 < g.nx; ++i) {
            if (!g.occupied(i, j)) continue;
            bool edge = false;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) edge |= !g.occupied(i + di, j + dj);
            if (edge) out.insert(static_cast<std::uint32_t>(g.index(i, j)));
        }
    return out;
}

} // namespace

TEST_CASE("rasterised disc area")
{
    auto g = rasterize({FilledDisc{0.0, 0.0, 1.0}}, 0.01, 0.1);
    CHECK_THAT(g.occupied_count() * 1e-4, WithinRel(pi, 2e-2));
}

TEST_CASE("a single point occupies one cell")
{
    auto g = rasterize({Point{0.3, -0.2}}, 0.01, 0.1);
    CHECK(g.occupied_count() == 1);
}

TEST_CASE("square boundary occupies about 4 / h cells")
{
    const double h = 0.005;
    auto g = rasterize(SetModel::square_boundary(1.0), RasterOptions{h, 0.2});
    CHECK_THAT(static_cast<double>(g.occupied_count()), WithinRel(4.0 / h, 5e-2));
}

TEST_CASE("rasterize errors")
{
    CHECK_THROWS_AS(rasterize({FilledDisc{0.0, 0.0, 1.0}}, 1e-4, 0.5, 1'000'000), resolution_error);
    CHECK_THROWS_AS(rasterize(SetModel::enclosed_dust(0.6, 1, 5), RasterOptions{}), std::domain_error);
    CHECK_THROWS_AS(rasterize(SetModel::cantor(), RasterOptions{}), std::domain_error);
}

TEST_CASE("distance to one occupied cell")
{
    auto g = blank(20, 20, 0.5);
    g.occupancy[g.index(5, 5)] = 1;
    auto F = distance_transform(g);
    CHECK_THAT(F.dist(g.index(8, 9)), WithinRel(2.5, 1e-15)); // offset (3, 4) cells
    CHECK(F.nearest[g.index(8, 9)] == g.index(5, 5));
    CHECK(F.dist(g.index(5, 5)) == 0.0);
}

TEST_CASE("fully occupied grid has zero distance everywhere")
{
    auto g = blank(7, 5);
    std::fill(g.occupancy.begin(), g.occupancy.end(), 1);
    auto F = distance_transform(g);
    for (auto v : F.d2) CHECK(v == 0);
    CHECK(F.sorted_d2.empty());
}

TEST_CASE("distance transform against brute force")
{
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        int nx = 5 + trial % 23, ny = 3 + (trial * 7) % 19;
        auto g = blank(nx, ny);
        std::bernoulli_distribution occ(trial % 3 == 0 ? 0.02 : 0.15);
        std::vector<std::pair<int, int>> pts;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (occ(rng)) {
                    g.occupancy[g.index(i, j)] = 1;
                    pts.push_back({i, j});
                }
        if (pts.empty()) {
            g.occupancy[0] = 1;
            pts.push_back({0, 0});
        }
        auto F = distance_transform(g);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                long best = 1L << 40;
                for (auto [a, b] : pts) best = std::min(best, long(a - i) * (a - i) + long(b - j) * (b - j));
                auto c = g.index(i, j);
                REQUIRE(F.d2[c] == best);
                int a = g.col(F.nearest[c]), b = g.row(F.nearest[c]);
                CHECK(g.occupied(a, b));
                CHECK(long(a - i) * (a - i) + long(b - j) * (b - j) == best);
            }
    }
}

TEST_CASE("thresholding the distance reproduces the set")
{
    auto F = field(SetModel::sierpinski_gasket(), 1.0 / 256.0, 5);
    const auto& g = *F.grid;
    for (std::size_t c = 0; c < g.size(); ++c) CHECK((F.d2[c] == 0) == (g.occupancy[c] != 0));
    // and the transform of the thresholded set is the same field
    GridSet again = g;
    for (std::size_t c = 0; c < g.size(); ++c) again.occupancy[c] = F.d2[c] == 0;
    CHECK(distance_transform(again).d2 == F.d2);
}

TEST_CASE("distance from a disc")
{
    const double h = 0.005;
    auto F = field({FilledDisc{0.0, 0.0, 1.0}}, h, 0.6);
    const auto& g = *F.grid;
    int i = static_cast<int>(std::floor((1.5 - g.origin_x) / h)), j = static_cast<int>(std::floor((0.0 - g.origin_y) / h));
    double r = std::hypot(g.center_x(i), g.center_y(j));
    CHECK_THAT(F.dist(g.index(i, j)), WithinAbs(r - 1.0, 2.0 * h));
}

TEST_CASE("parallel volumes against closed forms")
{
    const double h = 1.0 / 500.0;
    auto disc = field(SetModel::disc(1.0), h);
    auto circle = field(SetModel::circle(1.0), h);
    auto square = field(SetModel::square_boundary(1.0), h);
    for (double eps : {0.05, 0.1, 0.3}) {
        double ex = 2.0 * pi * eps + pi * eps * eps;
        CHECK_THAT(parallel_volume(disc, eps), WithinAbs(ex, std::max(0.01 * ex, 4.0 * h * 2.0 * pi)));
        double exc = 4.0 * pi * eps;
        CHECK_THAT(parallel_volume(circle, eps), WithinAbs(exc, std::max(0.01 * exc, 4.0 * h * 2.0 * pi)));
        double exs = 4.0 * eps + pi * eps * eps + 1.0 - (1.0 - 2.0 * eps) * (1.0 - 2.0 * eps);
        CHECK_THAT(parallel_volume(square, eps), WithinAbs(exs, std::max(0.01 * exs, 4.0 * h * 4.0)));
    }
    CHECK(parallel_volume(disc, 0.0) == 0.0);
    CHECK_THROWS_AS(parallel_volume(disc, 0.6), std::domain_error);
}

TEST_CASE("parallel volume is nondecreasing and grows by boundary length")
{
    const double h = 1.0 / 400.0;
    auto F = field(SetModel::disc(1.0), h);
    double prev = 0.0;
    for (double eps = h; eps < 0.45; eps += h / 3.0) {
        double v = parallel_volume(F, eps);
        CHECK(v >= prev);
        prev = v;
    }
    const double eps = 0.2, d = 0.02;
    double dv = parallel_volume(F, eps + d) - parallel_volume(F, eps);
    CHECK_THAT(dv / d, WithinRel(boundary_length(F, eps + d / 2.0), 5e-2));
}

TEST_CASE("boundary lengths of level sets")
{
    const double h = 1.0 / 400.0;
    auto disc = field(SetModel::disc(1.0), h);
    CHECK_THAT(boundary_length(disc, 0.2), WithinRel(2.0 * pi * 1.2, 2e-2));
    auto pt = field({Point{0.0, 0.0}}, h, 0.5);
    CHECK_THAT(boundary_length(pt, 0.3), WithinRel(2.0 * pi * 0.3, 2e-2));
    // square boundary: outer rounded square plus the inner square of side 1 - 2r
    auto sq = field(SetModel::square_boundary(1.0), h);
    const double r = 0.05;
    CHECK_THAT(boundary_length(sq, r), WithinRel(4.0 + 2.0 * pi * r + 4.0 * (1.0 - 2.0 * r), 2e-2));
}

TEST_CASE("boundary_length errors")
{
    auto F = field({Point{0.0, 0.0}}, 0.01, 0.2);
    CHECK_THROWS_AS(boundary_length(F, 0.005), std::domain_error);
    CHECK_THROWS_AS(boundary_length(F, 0.2), std::domain_error);
    // a grid whose padding is overstated lets the level set reach the border
    auto g = blank(21, 21, 0.01);
    g.pad = 1.0;
    g.occupancy[g.index(10, 10)] = 1;
    auto G = distance_transform(g);
    CHECK_THROWS_AS(boundary_length(G, 0.15), std::domain_error);
}

// largest distance from a cell of `cells` to the nearest footprint cell
double coverage_gap(const GridSet& g, const std::set<std::uint32_t>& cells, const Footprint& fp)
{
    double worst = 0.0;
    for (auto c : cells) {
        double best = 1e300;
        for (auto f : fp.cells)
            best = std::min(best, std::hypot(g.center_x(g.col(c)) - g.center_x(g.col(f)), g.center_y(g.row(c)) - g.center_y(g.row(f))));
        worst = std::max(worst, best);
    }
    return worst;
}

TEST_CASE("footprint of a disc lies on its boundary and covers it at scale t")
{
    // nearest points seen from far away gather on the corners of the digital disc,
    // so the footprint is sparse, but no boundary cell is farther than t / 2 from it
    const double h = 1.0 / 200.0;
    auto F = field(SetModel::disc(1.0), h);
    auto bd = boundary_cells(*F.grid);
    for (double t : {0.05, 0.2, 0.45}) {
        auto fp = footprint_Mt(F, t);
        std::size_t inside = 0;
        for (auto c : fp.cells) inside += bd.count(c);
        CHECK(inside == fp.cells.size());
        CHECK(coverage_gap(*F.grid, bd, fp) <= t / 2.0);
    }
}

TEST_CASE("footprint of a circle is seen from both sides")
{
    const double h = 1.0 / 200.0;
    auto F = field(SetModel::circle(1.0), h);
    std::set<std::uint32_t> ring;
    for (std::size_t c = 0; c < F.grid->size(); ++c)
        if (F.grid->occupancy[c]) ring.insert(static_cast<std::uint32_t>(c));
    // t = 0.3 is witnessed from inside and outside, t = 0.45 as well; each cell is listed once
    for (double t : {0.3, 0.45}) {
        auto fp = footprint_Mt(F, t);
        for (auto c : fp.cells) CHECK(ring.count(c) == 1);
        CHECK(std::set<std::uint32_t>(fp.cells.begin(), fp.cells.end()).size() == fp.cells.size());
        CHECK(coverage_gap(*F.grid, ring, fp) <= t / 2.0);
    }
}

TEST_CASE("footprint of two points")
{
    auto F = field({Point{0.0, 0.0}, Point{2.0, 0.0}}, 0.01, 0.6);
    auto fp = footprint_Mt(F, 0.5);
    CHECK(fp.cells.size() == 2);
    CHECK_FALSE(fp.empty_shell);
}

TEST_CASE("covering and packing counts")
{
    auto one = field({Point{0.0, 0.0}}, 0.01, 0.3);
    auto fp1 = footprint_Mt(one, 0.1);
    auto cp = covering_packing_counts(*one.grid, fp1, 0.1);
    CHECK(cp.theta == 1);
    CHECK(cp.theta_packing == 1);

    const double h = 1.0 / 512.0;
    auto seg = field({Segment{0.0, 0.0, 1.0, 0.0}}, h, 0.5);
    for (double t : {0.02, 0.05, 0.1}) {
        auto fp = footprint_Mt(seg, t);
        // a unit segment meets about sqrt(2) / t squares of side t / sqrt(2)
        CHECK(std::abs(static_cast<double>(covering_count(*seg.grid, fp, t)) - std::sqrt(2.0) / t) <= 2.0);
    }
    CHECK_THROWS_AS(covering_count(*seg.grid, footprint_Mt(seg, 0.1), h), resolution_error);
    Footprint empty;
    CHECK_THROWS_AS(covering_count(*seg.grid, empty, 0.1), std::domain_error);
}

TEST_CASE("covering and packing inequalities")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Primitive> cloud;
    for (int k = 0; k < 40; ++k) cloud.push_back(Point{U(rng), U(rng)});
    const double h = 1.0 / 256.0;
    std::vector<DistanceField> fields;
    fields.push_back(field(SetModel::disc(1.0), h));
    fields.push_back(field(SetModel::square_boundary(1.0), h));
    fields.push_back(field(SetModel::sierpinski_gasket(), h, 6));
    fields.push_back(field(cloud, h, 0.5));
    for (auto& F : fields) {
        const auto& g = *F.grid;
        for (double t = 2.0 * h; 4.0 * t + 2.0 * h <= g.pad; t *= 1.25) {
            auto fp = footprint_Mt(F, t), fp4 = footprint_Mt(F, 4.0 * t);
            if (fp.cells.empty() || fp4.cells.empty()) continue;
            long long theta = covering_count(g, fp, t), pack = packing_count(g, fp, t), theta4 = covering_count(g, fp4, 4.0 * t);
            CHECK(theta4 <= pack);
            CHECK(pack <= theta);
        }
    }
}

TEST_CASE("lens bound on parallel volumes")
{
    const double h = 1.0 / 256.0;
    for (auto F : {field(SetModel::disc(1.0), h), field(SetModel::square_boundary(1.0), h), field(SetModel::sierpinski_gasket(), h, 5)}) {
        for (double t = 10.0 * h; t + 2.0 * h <= F.grid->pad; t *= 1.25) {
            auto fp = footprint_Mt(F, t);
            if (fp.cells.empty()) continue;
            long long P = packing_count(*F.grid, fp, t);
            CHECK(parallel_volume(F, t) >= P * unit_lens_area * t * t);
        }
    }
}

TEST_CASE("raster distance zeta at s = 2 is the parallel volume")
{
    auto F = field(SetModel::disc(1.0), 1.0 / 128.0);
    for (double eps : {0.05, 0.2}) CHECK_THAT(distance_zeta_raster(F, 2.0, eps).real(), WithinRel(parallel_volume(F, eps), 1e-12));
    // disc: int over the band of d^{s-2} -> 2 pi (eps^{s-1} / (s-1) + eps^s / s)
    cplx s(2.5, 0.0);
    double eps = 0.3;
    double want = 2.0 * pi * (std::pow(eps, 1.5) / 1.5 + std::pow(eps, 2.5) / 2.5);
    CHECK_THAT(distance_zeta_raster(F, s, eps).real(), WithinRel(want, 2e-2));
}

TEST_CASE("raster dimensions of the gasket")
{
    auto F = field(SetModel::sierpinski_gasket(), 1.0 / 1024.0, 7);
    auto R = raster_dimensions(F, true);
    CHECK(R.t.size() >= 3);
    CHECK_THAT(R.box, WithinAbs(std::log2(3.0), 0.1));
    CHECK_THAT(R.volume, WithinAbs(std::log2(3.0), 0.1));
    auto small = field({Point{0.0, 0.0}}, 1.0 / 64.0, 0.5);
    CHECK_THROWS_AS(raster_dimensions(small, false), resolution_error);
}

TEST_CASE("PGM round trip and float dump")
{
    auto dir = std::filesystem::temp_directory_path() / "fractal_contents_raster_test";
    std::filesystem::create_directories(dir);
    auto g = rasterize(SetModel::square_boundary(1.0), RasterOptions{1.0 / 64.0, 0.25});
    std::string pgm = (dir / "sq.pgm").string();
    write_pgm(g, pgm);
    auto back = read_pgm(pgm);
    CHECK(back.nx == g.nx);
    CHECK(back.ny == g.ny);
    CHECK(back.occupancy == g.occupancy);
    CHECK(back.h == g.h);
    CHECK(back.origin_x == g.origin_x);
    CHECK(back.origin_y == g.origin_y);

    auto F = distance_transform(g);
    std::string raw = (dir / "sq.f32").string();
    write_distance_raw(F, raw);
    CHECK(std::filesystem::file_size(raw) == g.size() * sizeof(float));
    CHECK(std::filesystem::exists(raw + ".json"));
    CHECK_THROWS_AS(read_pgm((dir / "missing.pgm").string()), std::invalid_argument);
    std::filesystem::remove_all(dir);
}
