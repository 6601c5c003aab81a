#pragma once

// PGM (P5) grids and float32 distance dumps, each with a JSON sidecar.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "raster2d.hpp"

namespace fractal_contents {

inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

namespace detail {

inline void write_json_file(const std::string& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline nlohmann::json grid_sidecar(const GridSet& g)
{
    return {{"h", g.h}, {"origin", {g.origin_x, g.origin_y}}, {"extent", {g.nx, g.ny}}, {"pad", g.pad}};
}

} // namespace detail

/** Occupied cells are 255. The first image row is the top grid row (largest y). */
inline void write_pgm(const GridSet& g, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    std::vector<char> row(g.nx);
    for (int j = g.ny - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx; ++i) row[i] = g.occupied(i, j) ? static_cast<char>(255) : 0;
        out.write(row.data(), g.nx);
    }
    detail::write_json_file(sidecar_path(path), detail::grid_sidecar(g));
}

/** Reads a P5 image (maxval < 256) and its sidecar; any nonzero pixel is occupied. */
inline GridSet read_pgm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::invalid_argument(path + ": not a binary PGM");
    auto next_int = [&]() {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string skip;
            std::getline(in, skip);
            in >> std::ws;
        }
        long v;
        if (!(in >> v)) throw std::invalid_argument(path + ": bad PGM header");
        return v;
    };
    long nx = next_int(), ny = next_int(), maxval = next_int();
    if (nx <= 0 || ny <= 0 || maxval <= 0 || maxval > 255) throw std::invalid_argument(path + ": unsupported PGM dimensions or depth");
    in.get();
    GridSet g;
    g.nx = static_cast<int>(nx);
    g.ny = static_cast<int>(ny);
    g.occupancy.assign(static_cast<std::size_t>(nx) * ny, 0);
    std::vector<unsigned char> row(nx);
    for (long j = ny - 1; j >= 0; --j) {
        if (!in.read(reinterpret_cast<char*>(row.data()), nx)) throw std::invalid_argument(path + ": truncated pixel data");
        for (long i = 0; i < nx; ++i) g.occupancy[g.index(static_cast<int>(i), static_cast<int>(j))] = row[i] ? 1 : 0;
    }
    std::ifstream sc(sidecar_path(path));
    if (!sc) throw std::invalid_argument("missing sidecar " + sidecar_path(path));
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(sc);
        g.h = j.at("h").get<double>();
        g.origin_x = j.at("origin").at(0).get<double>();
        g.origin_y = j.at("origin").at(1).get<double>();
        g.pad = j.value("pad", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(sidecar_path(path) + ": " + e.what());
    }
    if (!(g.h > 0.0)) throw std::invalid_argument(sidecar_path(path) + ": h must be positive");
    return g;
}

/** Distances in model units as native-endian float32, row major from the bottom row. */
inline void write_distance_raw(const DistanceField& F, const std::string& path)
{
    const GridSet& g = *F.grid;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    std::vector<float> row(g.nx);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) row[i] = static_cast<float>(F.dist(g.index(i, j)));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    auto j = detail::grid_sidecar(g);
    j["dtype"] = "float32";
    j["row_order"] = "bottom_to_top";
    detail::write_json_file(sidecar_path(path), j);
}

} // namespace fractal_contents
