#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "set_models.hpp"

namespace fractal_contents {

// ---------------------------------------------------------------------------
// Grid and primitives
// ---------------------------------------------------------------------------

struct GridSet {
    double h = 1.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    int nx = 0;
    int ny = 0;
    double pad = 0.0;
    std::vector<std::uint8_t> occupancy; // row major, row j at y = origin_y + (j + 1/2) h

    std::size_t size() const { return occupancy.size(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    int col(std::size_t c) const { return static_cast<int>(c % nx); }
    int row(std::size_t c) const { return static_cast<int>(c / nx); }
    double center_x(int i) const { return origin_x + (i + 0.5) * h; }
    double center_y(int j) const { return origin_y + (j + 0.5) * h; }
    bool occupied(int i, int j) const { return occupancy[index(i, j)] != 0; }

    std::size_t occupied_count() const
    {
        return static_cast<std::size_t>(std::count_if(occupancy.begin(), occupancy.end(), [](std::uint8_t v) { return v != 0; }));
    }
};

struct Segment {
    double x0, y0, x1, y1;
};
struct FilledTriangle {
    double x[3], y[3];
};
struct FilledDisc {
    double cx, cy, R;
};
struct CircleCurve {
    double cx, cy, R;
};
struct Point {
    double x, y;
};
/** Filled simple polygon, even-odd rule. */
struct FilledPolygon {
    std::vector<double> x, y;
};

using Primitive = std::variant<Segment, FilledTriangle, FilledDisc, CircleCurve, Point, FilledPolygon>;

struct RasterOptions {
    double h = 1.0 / 256.0;
    double pad = 0.5;
    std::size_t max_cells = 64'000'000;
    int gasket_level = 7;
    int window_level = 6;
};

namespace detail {

struct Box {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double y1 = -std::numeric_limits<double>::infinity();

    void add(double x, double y)
    {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
    }
};

inline Box bounds(const Primitive& p)
{
    Box b;
    std::visit(
        [&](auto&& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, Segment>) {
                b.add(q.x0, q.y0);
                b.add(q.x1, q.y1);
            } else if constexpr (std::is_same_v<T, FilledTriangle>) {
                for (int k = 0; k < 3; ++k) b.add(q.x[k], q.y[k]);
            } else if constexpr (std::is_same_v<T, FilledDisc> || std::is_same_v<T, CircleCurve>) {
                b.add(q.cx - q.R, q.cy - q.R);
                b.add(q.cx + q.R, q.cy + q.R);
            } else if constexpr (std::is_same_v<T, Point>) {
                b.add(q.x, q.y);
            } else {
                for (std::size_t k = 0; k < q.x.size(); ++k) b.add(q.x[k], q.y[k]);
            }
        },
        p);
    return b;
}

inline double point_segment_distance(double px, double py, const Segment& s)
{
    double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    double len2 = dx * dx + dy * dy;
    double u = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    double qx = s.x0 + u * dx - px, qy = s.y0 + u * dy - py;
    return std::sqrt(qx * qx + qy * qy);
}

inline bool inside_triangle(double px, double py, const FilledTriangle& t)
{
    auto cross = [&](int a, int b) { return (t.x[b] - t.x[a]) * (py - t.y[a]) - (t.y[b] - t.y[a]) * (px - t.x[a]); };
    double c0 = cross(0, 1), c1 = cross(1, 2), c2 = cross(2, 0);
    bool neg = c0 < 0 || c1 < 0 || c2 < 0;
    bool pos = c0 > 0 || c1 > 0 || c2 > 0;
    return !(neg && pos);
}

inline bool inside_polygon(double px, double py, const FilledPolygon& p)
{
    bool in = false;
    std::size_t n = p.x.size();
    for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
        if ((p.y[a] > py) != (p.y[b] > py)) {
            double xi = p.x[b] + (py - p.y[b]) * (p.x[a] - p.x[b]) / (p.y[a] - p.y[b]);
            if (px < xi) in = !in;
        }
    }
    return in;
}

inline int thread_count()
{
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* e = std::getenv("FRACTAL_CONTENTS_THREADS")) {
        int v = std::atoi(e);
        if (v >= 1) n = std::min(n, v);
    }
    return n;
}

template <class F>
void parallel_for(int count, const F& f)
{
    int nt = std::min(thread_count(), std::max(1, count / 64));
    if (nt <= 1) {
        for (int k = 0; k < count; ++k) f(k);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (int k = t; k < count; k += nt) f(k);
        });
    for (auto& th : pool) th.join();
}

} // namespace detail

/**
 * Cells are occupied when their centre lies in a filled primitive, within h/2
 * of a curve, or (for points) when the cell contains the point.
 */
inline GridSet rasterize(const std::vector<Primitive>& prims, double h, double pad, std::size_t max_cells = 64'000'000)
{
    if (!(h > 0.0)) throw std::domain_error("rasterize needs h > 0");
    if (!(pad >= 0.0)) throw std::domain_error("rasterize needs pad >= 0");
    if (prims.empty()) throw std::domain_error("rasterize: nothing to draw");
    detail::Box bb;
    for (auto& p : prims) {
        auto b = detail::bounds(p);
        bb.add(b.x0, b.y0);
        bb.add(b.x1, b.y1);
    }
    GridSet g;
    g.h = h;
    g.pad = pad;
    // cell centres sit on the lattice h Z^2, so axis-parallel curves through
    // lattice lines are one cell thick
    g.origin_x = h * (std::floor((bb.x0 - pad) / h) - 1.0) - 0.5 * h;
    g.origin_y = h * (std::floor((bb.y0 - pad) / h) - 1.0) - 0.5 * h;
    double nxd = std::ceil((bb.x1 + pad + h - g.origin_x) / h) + 1.0;
    double nyd = std::ceil((bb.y1 + pad + h - g.origin_y) / h) + 1.0;
    if (nxd * nyd > static_cast<double>(max_cells) || nxd * nxd + nyd * nyd > 4.0e9)
        throw resolution_error("rasterize: grid of " + std::to_string(nxd * nyd) + " cells exceeds the configured cap");
    g.nx = static_cast<int>(nxd);
    g.ny = static_cast<int>(nyd);
    g.occupancy.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);

    auto cell_range = [&](const detail::Box& b, int& i0, int& i1, int& j0, int& j1) {
        i0 = std::max(0, static_cast<int>(std::floor((b.x0 - g.origin_x) / h)) - 1);
        i1 = std::min(g.nx - 1, static_cast<int>(std::floor((b.x1 - g.origin_x) / h)) + 1);
        j0 = std::max(0, static_cast<int>(std::floor((b.y0 - g.origin_y) / h)) - 1);
        j1 = std::min(g.ny - 1, static_cast<int>(std::floor((b.y1 - g.origin_y) / h)) + 1);
    };
    const double half = 0.5 * h * (1.0 + 1e-12);
    for (auto& p : prims) {
        int i0, i1, j0, j1;
        cell_range(detail::bounds(p), i0, i1, j0, j1);
        std::visit(
            [&](auto&& q) {
                using T = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<T, Point>) {
                    int i = static_cast<int>(std::floor((q.x - g.origin_x) / h));
                    int j = static_cast<int>(std::floor((q.y - g.origin_y) / h));
                    g.occupancy[g.index(i, j)] = 1;
                } else {
                    for (int j = j0; j <= j1; ++j)
                        for (int i = i0; i <= i1; ++i) {
                            double x = g.center_x(i), y = g.center_y(j);
                            bool on = false;
                            if constexpr (std::is_same_v<T, Segment>) on = detail::point_segment_distance(x, y, q) <= half;
                            else if constexpr (std::is_same_v<T, FilledTriangle>) on = detail::inside_triangle(x, y, q);
                            else if constexpr (std::is_same_v<T, FilledDisc>) on = (x - q.cx) * (x - q.cx) + (y - q.cy) * (y - q.cy) <= q.R * q.R;
                            else if constexpr (std::is_same_v<T, CircleCurve>) on = std::abs(std::hypot(x - q.cx, y - q.cy) - q.R) <= half;
                            else on = detail::inside_polygon(x, y, q);
                            if (on) g.occupancy[g.index(i, j)] = 1;
                        }
                }
            },
            p);
    }
    if (g.occupied_count() == 0) throw resolution_error("rasterize: no cell is occupied at this resolution");
    return g;
}

namespace detail {

inline void gasket_triangles(std::vector<Primitive>& out, double x, double y, double side, int level, double s)
{
    if (level == 0) {
        FilledTriangle t{{x * s, (x + side) * s, (x + side / 2.0) * s}, {y * s, y * s, (y + side * std::sqrt(3.0) / 2.0) * s}};
        out.push_back(t);
        return;
    }
    double hs = side / 2.0;
    gasket_triangles(out, x, y, hs, level - 1, s);
    gasket_triangles(out, x + hs, y, hs, level - 1, s);
    gasket_triangles(out, x + hs / 2.0, y + hs * std::sqrt(3.0) / 2.0, hs, level - 1, s);
}

inline void square_frame(std::vector<Primitive>& out, double x, double y, double a)
{
    out.push_back(Segment{x, y, x + a, y});
    out.push_back(Segment{x + a, y, x + a, y + a});
    out.push_back(Segment{x + a, y + a, x, y + a});
    out.push_back(Segment{x, y + a, x, y});
}

inline void window_frames(std::vector<Primitive>& out, double x, double y, double a, double r, int level)
{
    square_frame(out, x, y, a);
    if (level == 0) return;
    double p = (1.0 - 2.0 * r) / 3.0 * a;
    double ra = r * a;
    window_frames(out, x + p, y + p, ra, r, level - 1);
    window_frames(out, x + p, y + 2.0 * p + ra, ra, r, level - 1);
    window_frames(out, x + 2.0 * p + ra, y + p, ra, r, level - 1);
    window_frames(out, x + 2.0 * p + ra, y + 2.0 * p + ra, ra, r, level - 1);
}

} // namespace detail

/** Planar geometry of a model; gasket and window use the prefractal depth from the options. */
inline std::vector<Primitive> model_primitives(const SetModel& m, const RasterOptions& opt)
{
    std::vector<Primitive> out;
    const auto& p = m.params();
    const double s = m.scale();
    switch (m.kind()) {
    case ModelKind::disc: out.push_back(FilledDisc{0.0, 0.0, p[0]}); break;
    case ModelKind::circle: out.push_back(CircleCurve{0.0, 0.0, p[0]}); break;
    case ModelKind::square_boundary: detail::square_frame(out, -p[0] / 2.0, -p[0] / 2.0, p[0]); break;
    case ModelKind::parallel_segments:
        out.push_back(Segment{0.0, 0.0, p[0], 0.0});
        out.push_back(Segment{0.0, p[1], p[0], p[1]});
        break;
    case ModelKind::sierpinski_gasket:
        if (opt.gasket_level < 0) throw std::domain_error("rasterize: gasket level must be >= 0");
        detail::gasket_triangles(out, 0.0, 0.0, 1.0, opt.gasket_level, s);
        break;
    case ModelKind::fractal_window: {
        int lv = static_cast<int>(std::min<long>(opt.window_level, m.level()));
        std::vector<Primitive> tmp;
        detail::window_frames(tmp, 0.0, 0.0, 1.0, p[0], lv);
        for (auto& q : tmp) {
            auto sg = std::get<Segment>(q);
            out.push_back(Segment{sg.x0 * s, sg.y0 * s, sg.x1 * s, sg.y1 * s});
        }
        break;
    }
    default:
        throw std::domain_error(std::string("rasterize: no planar geometry for model ") + model_kind_name(m.kind()));
    }
    return out;
}

inline GridSet rasterize(const SetModel& m, const RasterOptions& opt)
{
    return rasterize(model_primitives(m, opt), opt.h, opt.pad, opt.max_cells);
}

// ---------------------------------------------------------------------------
// Distance transform
// ---------------------------------------------------------------------------

struct DistanceField {
    std::shared_ptr<const GridSet> grid;
    std::vector<std::uint32_t> d2;       // squared distance in cell units
    std::vector<std::uint32_t> nearest;  // occupied cell realising d2
    std::vector<std::uint32_t> sorted_d2; // positive values, ascending

    double h() const { return grid->h; }
    double dist(std::size_t c) const { return grid->h * std::sqrt(static_cast<double>(d2[c])); }
    double max_dist() const { return sorted_d2.empty() ? 0.0 : grid->h * std::sqrt(static_cast<double>(sorted_d2.back())); }
};

namespace detail {

inline constexpr std::uint32_t inf_u32 = std::numeric_limits<std::uint32_t>::max();

// Lower envelope of parabolas (x - q)^2 + f(q) over the finite entries of f.
inline void envelope_1d(const std::vector<std::uint32_t>& f, std::vector<std::uint32_t>& out_d, std::vector<int>& out_arg,
                        std::vector<int>& v, std::vector<double>& z)
{
    const int n = static_cast<int>(f.size());
    int k = -1;
    auto key = [&](int q) { return static_cast<double>(f[q]) + static_cast<double>(q) * q; };
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf_u32) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -std::numeric_limits<double>::infinity();
            z[1] = std::numeric_limits<double>::infinity();
            continue;
        }
        double s = (key(q) - key(v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = (key(q) - key(v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (k < 0) {
        std::fill(out_d.begin(), out_d.end(), inf_u32);
        std::fill(out_arg.begin(), out_arg.end(), -1);
        return;
    }
    int j = 0;
    for (int x = 0; x < n; ++x) {
        while (z[j + 1] < x) ++j;
        long long dx = x - v[j];
        out_d[x] = static_cast<std::uint32_t>(dx * dx + f[v[j]]);
        out_arg[x] = v[j];
    }
}

} // namespace detail

/** Exact squared Euclidean distance to the occupied cell centres, separable in two passes. */
inline DistanceField distance_transform(const GridSet& grid)
{
    if (grid.occupied_count() == 0) throw std::domain_error("distance_transform: empty grid");
    const int nx = grid.nx, ny = grid.ny;
    DistanceField F;
    F.grid = std::make_shared<const GridSet>(grid);
    const std::size_t N = grid.size();
    std::vector<std::uint32_t> gcol(N, detail::inf_u32);
    std::vector<int> grow(N, -1);

    // columns: nearest occupied cell in the same column
    detail::parallel_for(nx, [&](int i) {
        int last = -1;
        for (int j = 0; j < ny; ++j) {
            if (grid.occupied(i, j)) last = j;
            if (last >= 0) {
                gcol[grid.index(i, j)] = static_cast<std::uint32_t>(j - last);
                grow[grid.index(i, j)] = last;
            }
        }
        last = -1;
        for (int j = ny - 1; j >= 0; --j) {
            if (grid.occupied(i, j)) last = j;
            if (last >= 0) {
                std::size_t c = grid.index(i, j);
                std::uint32_t d = static_cast<std::uint32_t>(last - j);
                // strictly closer from above; ties keep the lower row
                if (gcol[c] == detail::inf_u32 || d < gcol[c]) {
                    gcol[c] = d;
                    grow[c] = last;
                }
            }
        }
        for (int j = 0; j < ny; ++j) {
            std::size_t c = grid.index(i, j);
            if (gcol[c] != detail::inf_u32) gcol[c] *= gcol[c];
        }
    });

    F.d2.assign(N, 0);
    F.nearest.assign(N, 0);
    detail::parallel_for(ny, [&](int j) {
        std::vector<std::uint32_t> f(nx), d(nx);
        std::vector<int> arg(nx), v(nx + 1);
        std::vector<double> z(nx + 2);
        for (int i = 0; i < nx; ++i) f[i] = gcol[grid.index(i, j)];
        detail::envelope_1d(f, d, arg, v, z);
        for (int i = 0; i < nx; ++i) {
            std::size_t c = grid.index(i, j);
            F.d2[c] = d[i];
            int src = arg[i];
            F.nearest[c] = static_cast<std::uint32_t>(grid.index(src, grow[grid.index(src, j)]));
        }
    });

    F.sorted_d2.reserve(N - grid.occupied_count());
    for (auto v : F.d2)
        if (v > 0) F.sorted_d2.push_back(v);
    std::sort(F.sorted_d2.begin(), F.sorted_d2.end());
    return F;
}

namespace detail {

inline double cell_units_sq(double eps, double h)
{
    double u = eps / h;
    return u * u * (1.0 + 1e-12);
}

} // namespace detail

/** h^2 #{cells : 0 < dist <= eps}. */
inline double parallel_volume(const DistanceField& F, double eps)
{
    if (eps > F.grid->pad * (1.0 + 1e-12)) throw std::domain_error("parallel_volume: eps exceeds the grid padding");
    if (!(eps > 0.0)) return 0.0;
    double lim = detail::cell_units_sq(eps, F.h());
    auto it = std::upper_bound(F.sorted_d2.begin(), F.sorted_d2.end(), lim,
                               [](double a, std::uint32_t b) { return a < static_cast<double>(b); });
    return F.h() * F.h() * static_cast<double>(it - F.sorted_d2.begin());
}

/** h^2 #{cells : dist <= eps}, the area of the whole parallel set. */
inline double parallel_set_area(const DistanceField& F, double eps)
{
    double occ = static_cast<double>(F.grid->size() - F.sorted_d2.size());
    return parallel_volume(F, eps) + F.h() * F.h() * occ;
}

/** Length of {dist = r} by marching squares over the cell centres. */
inline double boundary_length(const DistanceField& F, double r)
{
    const GridSet& g = *F.grid;
    if (!(r > g.h && r < g.pad)) throw std::domain_error("boundary_length needs r in (h, pad)");
    for (int i = 0; i < g.nx; ++i)
        if (F.dist(g.index(i, 0)) <= r || F.dist(g.index(i, g.ny - 1)) <= r)
            throw std::domain_error("boundary_length: level set exits the grid");
    for (int j = 0; j < g.ny; ++j)
        if (F.dist(g.index(0, j)) <= r || F.dist(g.index(g.nx - 1, j)) <= r)
            throw std::domain_error("boundary_length: level set exits the grid");

    const double h = g.h;
    double total = 0.0;
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            // corners counter-clockwise from lower left
            double v[4] = {F.dist(g.index(i, j)) - r, F.dist(g.index(i + 1, j)) - r, F.dist(g.index(i + 1, j + 1)) - r,
                           F.dist(g.index(i, j + 1)) - r};
            int code = 0;
            for (int k = 0; k < 4; ++k)
                if (v[k] < 0.0) code |= 1 << k;
            if (code == 0 || code == 15) continue;
            static const double cx[4] = {0.0, 1.0, 1.0, 0.0};
            static const double cy[4] = {0.0, 0.0, 1.0, 1.0};
            double px[4], py[4];
            int np = 0;
            for (int k = 0; k < 4; ++k) {
                int l = (k + 1) % 4;
                if ((v[k] < 0.0) != (v[l] < 0.0)) {
                    double u = v[k] / (v[k] - v[l]);
                    px[np] = cx[k] + u * (cx[l] - cx[k]);
                    py[np] = cy[k] + u * (cy[l] - cy[k]);
                    ++np;
                }
            }
            if (np == 2)
                total += std::hypot(px[1] - px[0], py[1] - py[0]);
            else if (np == 4) {
                // saddle: pair crossings by the sign of the centre value
                double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                bool first_inside = v[0] < 0.0;
                if ((centre < 0.0) == first_inside) {
                    total += std::hypot(px[1] - px[0], py[1] - py[0]) + std::hypot(px[3] - px[2], py[3] - py[2]);
                } else {
                    total += std::hypot(px[0] - px[3], py[0] - py[3]) + std::hypot(px[2] - px[1], py[2] - py[1]);
                }
            }
        }
    }
    return total * h;
}

/** Occupied cells reached as nearest points from cells with t < dist <= t + shell. */
struct Footprint {
    std::vector<std::uint32_t> cells; // ascending
    bool empty_shell = false;
};

inline Footprint footprint_Mt(const DistanceField& F, double t, double shell = -1.0)
{
    const GridSet& g = *F.grid;
    if (shell <= 0.0) shell = 2.0 * g.h;
    if (!(t > 0.0)) throw std::domain_error("footprint_Mt needs t > 0");
    if (t + shell > g.pad * (1.0 + 1e-12)) throw std::domain_error("footprint_Mt needs t + shell <= pad");
    double lo = (t / g.h) * (t / g.h);
    double hi = detail::cell_units_sq(t + shell, g.h);
    std::vector<std::uint8_t> mark(g.size(), 0);
    bool any = false;
    for (std::size_t c = 0; c < g.size(); ++c) {
        double d = static_cast<double>(F.d2[c]);
        if (d > lo && d <= hi) {
            mark[F.nearest[c]] = 1;
            any = true;
        }
    }
    Footprint fp;
    fp.empty_shell = !any;
    for (std::size_t c = 0; c < g.size(); ++c)
        if (mark[c]) fp.cells.push_back(static_cast<std::uint32_t>(c));
    return fp;
}

struct CoverPack {
    long long theta = 0;
    long long theta_packing = 0;
};

namespace detail {

inline long long bucket_count(const GridSet& g, const std::vector<std::uint32_t>& cells, double side, double ox, double oy)
{
    std::vector<std::int64_t> keys;
    keys.reserve(cells.size());
    for (auto c : cells) {
        double x = g.center_x(g.col(c)) - g.origin_x + ox;
        double y = g.center_y(g.row(c)) - g.origin_y + oy;
        std::int64_t bx = static_cast<std::int64_t>(std::floor(x / side));
        std::int64_t by = static_cast<std::int64_t>(std::floor(y / side));
        keys.push_back((by << 32) ^ (bx & 0xffffffffLL));
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<long long>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

} // namespace detail

/** Cells of side t/sqrt(2) that meet the footprint, and a greedy packing by disjoint open t-balls. */
inline long long covering_count(const GridSet& g, const Footprint& fp, double t, int offsets = 4)
{
    if (fp.cells.empty()) throw std::domain_error("covering_count: empty footprint");
    if (t < 2.0 * g.h) throw resolution_error("covering_count needs t >= 2h");
    double side = t / std::sqrt(2.0);
    long long best = std::numeric_limits<long long>::max();
    // any shift of the bucket lattice is still a cover; keep the smallest
    for (int a = 0; a < offsets; ++a)
        for (int b = 0; b < offsets; ++b)
            best = std::min(best, detail::bucket_count(g, fp.cells, side, side * a / offsets, side * b / offsets));
    return best;
}

inline long long packing_count(const GridSet& g, const Footprint& fp, double t)
{
    if (fp.cells.empty()) throw std::domain_error("packing_count: empty footprint");
    if (t < 2.0 * g.h) throw resolution_error("packing_count needs t >= 2h");
    const double sep2 = 4.0 * t * t;
    const double side = 2.0 * t;
    std::vector<std::vector<std::pair<double, double>>> buckets;
    auto key_of = [&](std::int64_t bx, std::int64_t by) { return (by << 32) ^ (bx & 0xffffffffLL); };
    // open addressing would be faster; a sorted index is plenty at these sizes
    std::vector<std::pair<std::int64_t, std::size_t>> index;
    auto find = [&](std::int64_t k) -> long {
        auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(k, std::size_t{0}));
        if (it != index.end() && it->first == k) return static_cast<long>(it->second);
        return -1;
    };
    long long count = 0;
    for (auto c : fp.cells) {
        double x = g.center_x(g.col(c)), y = g.center_y(g.row(c));
        std::int64_t bx = static_cast<std::int64_t>(std::floor((x - g.origin_x) / side));
        std::int64_t by = static_cast<std::int64_t>(std::floor((y - g.origin_y) / side));
        bool ok = true;
        for (int dy = -1; dy <= 1 && ok; ++dy)
            for (int dx = -1; dx <= 1 && ok; ++dx) {
                long b = find(key_of(bx + dx, by + dy));
                if (b < 0) continue;
                for (auto& q : buckets[b]) {
                    double ex = q.first - x, ey = q.second - y;
                    if (ex * ex + ey * ey < sep2) {
                        ok = false;
                        break;
                    }
                }
            }
        if (!ok) continue;
        ++count;
        std::int64_t k = key_of(bx, by);
        long b = find(k);
        if (b < 0) {
            buckets.push_back({});
            b = static_cast<long>(buckets.size() - 1);
            auto pos = std::lower_bound(index.begin(), index.end(), std::make_pair(k, std::size_t{0}));
            index.insert(pos, {k, static_cast<std::size_t>(b)});
        }
        buckets[b].push_back({x, y});
    }
    return count;
}

inline CoverPack covering_packing_counts(const GridSet& g, const Footprint& fp, double t)
{
    return {covering_count(g, fp, t), packing_count(g, fp, t)};
}

/** Unit lens: two unit discs with centres at distance one. */
inline const double unit_lens_area = 2.0 * std::numbers::pi / 3.0 - std::sqrt(3.0) / 2.0;

/** sum over 0 < dist <= eps of h^2 dist^{s-2}, the planar distance zeta function on the grid. */
inline std::complex<double> distance_zeta_raster(const DistanceField& F, std::complex<double> s, double eps)
{
    if (eps > F.grid->pad * (1.0 + 1e-12)) throw std::domain_error("distance_zeta_raster: eps exceeds the grid padding");
    double lim = detail::cell_units_sq(eps, F.h());
    std::complex<double> acc = 0.0;
    const double h = F.h();
    // equal squared distances come in runs
    std::size_t k = 0;
    while (k < F.sorted_d2.size() && static_cast<double>(F.sorted_d2[k]) <= lim) {
        std::size_t e = k;
        while (e < F.sorted_d2.size() && F.sorted_d2[e] == F.sorted_d2[k]) ++e;
        double d = h * std::sqrt(static_cast<double>(F.sorted_d2[k]));
        acc += static_cast<double>(e - k) * std::exp((s - 2.0) * std::log(d));
        k = e;
    }
    return acc * h * h;
}

} // namespace fractal_contents
