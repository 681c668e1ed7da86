#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wulff/body.hpp"
#include "wulff/errors.hpp"
#include "wulff/flow.hpp"
#include "wulff/gamma_spec.hpp"
#include "wulff/polytope.hpp"

namespace wulff {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingRunError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

template <int N>
json support_body_to_json(const SupportBody<N>& b) {
    json j;
    j["n"] = N;
    if constexpr (N == 1)
        j["grid_size"] = b.grid->size();
    else
        j["grid_size"] = {b.grid->nlat(), b.grid->nlon()};
    std::vector<double> h(b.h.data(), b.h.data() + b.h.size());
    j["h"] = h;
    std::vector<double> off(b.offset.data(), b.offset.data() + N + 1);
    j["offset"] = off;
    return j;
}

template <int N>
SupportBody<N> support_body_from_json(const json& j, const SphereGrid<N>& grid) {
    if (j.value("n", N) != N) throw ParseError("support body: dimension mismatch");
    SupportBody<N> b;
    b.grid = &grid;
    auto h = j.at("h").get<std::vector<double>>();
    if (static_cast<int>(h.size()) != grid.size())
        throw ParseError("support body: sample count does not match the grid");
    b.h.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) b.h[i] = h[i];
    if (j.contains("offset")) {
        auto off = j.at("offset").get<std::vector<double>>();
        for (int d = 0; d <= N && d < static_cast<int>(off.size()); ++d) b.offset[d] = off[d];
    }
    return b;
}

template <int D>
json polytope_to_json(const PolytopeBody<D>& p) {
    json j;
    j["dim"] = D;
    json vs = json::array();
    for (const auto& v : p.verts) {
        std::vector<double> row(v.data(), v.data() + D);
        vs.push_back(row);
    }
    j["vertices"] = vs;
    return j;
}

template <int D>
PolytopeBody<D> polytope_from_json(const json& j) {
    if (j.value("dim", D) != D) throw ParseError("polytope: dimension mismatch");
    std::vector<Eigen::Matrix<double, D, 1>> vs;
    for (const auto& row : j.at("vertices")) {
        auto v = row.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != D) throw ParseError("polytope: vertex dimension");
        Eigen::Matrix<double, D, 1> p;
        for (int d = 0; d < D; ++d) p[d] = v[d];
        vs.push_back(p);
    }
    return PolytopeBody<D>(std::move(vs));
}

// ---------------------------------------------------------------------------
// monitor CSV
// ---------------------------------------------------------------------------

inline const char* monitor_csv_header() {
    return "t,vol,area_gamma,V,I,phi,Ekmin,Ekmax,kmin,kmax,dhaus,grad_s_max,dt";
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string monitors_to_csv(const std::vector<MonitorRecord>& rs) {
    std::ostringstream out;
    out << monitor_csv_header() << "\n";
    for (const auto& r : rs) {
        const double cols[] = {r.t,    r.vol,  r.area_gamma, r.V,     r.I,
                               r.phi,  r.Ekmin, r.Ekmax,     r.kmin,  r.kmax,
                               r.dhaus, r.grad_s_max, r.dt};
        for (int c = 0; c < 13; ++c) out << (c ? "," : "") << format_g17(cols[c]);
        out << "\n";
    }
    return out.str();
}

inline std::vector<MonitorRecord> monitors_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingRunError("no monitor file at " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty monitor file");
    if (line != monitor_csv_header()) throw ParseError(path + ": unexpected monitor header");
    std::vector<MonitorRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double cols[13];
        std::string cell;
        for (int c = 0; c < 13; ++c) {
            if (!std::getline(ls, cell, ',')) throw ParseError(path + ": short monitor row");
            cols[c] = std::stod(cell);
        }
        MonitorRecord r;
        r.t = cols[0];
        r.vol = cols[1];
        r.area_gamma = cols[2];
        r.V = cols[3];
        r.I = cols[4];
        r.phi = cols[5];
        r.Ekmin = cols[6];
        r.Ekmax = cols[7];
        r.kmin = cols[8];
        r.kmax = cols[9];
        r.dhaus = cols[10];
        r.grad_s_max = cols[11];
        r.dt = cols[12];
        out.push_back(r);
    }
    return out;
}

}  // namespace wulff
