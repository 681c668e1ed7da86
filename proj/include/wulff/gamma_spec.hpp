#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wulff/errors.hpp"
#include "wulff/fft.hpp"

namespace wulff {

struct GammaTerm {
    int m = 0;
    double a = 0.0;
    double b = 0.0;
};

/// User-level description of the anisotropy gamma on S^n. "trig" carries a
/// cosine/sine series for n = 1 and axis-symmetric Legendre coefficients
/// (in cos of the polar angle) for n = 2.
struct GammaSpec {
    enum class Kind { Constant, Trig, Ellipse, Table };

    int n = 1;
    Kind kind = Kind::Constant;
    double c = 1.0;
    double a0 = 1.0;
    std::vector<GammaTerm> terms;
    std::vector<double> axes;
    std::vector<double> table;
    int table_nlat = 0, table_nlon = 0;
    int grid_size = 0;  // n = 1; 0 means default (512)
    int grid_nlat = 0, grid_nlon = 0;  // n = 2; 0 means default (96 x 192)

    static GammaSpec constant(int n, double value) {
        GammaSpec s;
        s.n = n;
        s.kind = Kind::Constant;
        s.c = value;
        return s;
    }
    static GammaSpec trig1(double a0, std::vector<GammaTerm> ts) {
        GammaSpec s;
        s.n = 1;
        s.kind = Kind::Trig;
        s.a0 = a0;
        s.terms = std::move(ts);
        return s;
    }
    static GammaSpec ellipse(std::vector<double> semi_axes) {
        GammaSpec s;
        s.n = static_cast<int>(semi_axes.size()) - 1;
        s.kind = Kind::Ellipse;
        s.axes = std::move(semi_axes);
        return s;
    }
};

inline double legendre_p(int m, double x) {
    if (m == 0) return 1.0;
    double pm1 = 1.0, p = x;
    for (int k = 1; k < m; ++k) {
        double pn = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
        pm1 = p;
        p = pn;
    }
    return p;
}

/// Smooth 1-D evaluators gamma(theta), gamma'(theta), gamma''(theta) for an
/// n = 1 spec (tables are converted to their trigonometric interpolant).
struct Gamma1D {
    double a0 = 0.0;
    std::vector<GammaTerm> terms;  // empty + axes set => ellipse closed form
    std::vector<double> axes;

    double value(double t) const {
        if (!axes.empty()) return std::sqrt(g2(t));
        double v = a0;
        for (const auto& tm : terms) v += tm.a * std::cos(tm.m * t) + tm.b * std::sin(tm.m * t);
        return v;
    }
    double d1(double t) const {
        if (!axes.empty()) return dg2(t) / (2.0 * std::sqrt(g2(t)));
        double v = 0.0;
        for (const auto& tm : terms)
            v += tm.m * (-tm.a * std::sin(tm.m * t) + tm.b * std::cos(tm.m * t));
        return v;
    }
    double d2(double t) const {
        if (!axes.empty()) {
            const double g = g2(t), s = std::sqrt(g);
            return ddg2(t) / (2.0 * s) - dg2(t) * dg2(t) / (4.0 * g * s);
        }
        double v = 0.0;
        for (const auto& tm : terms)
            v -= tm.m * tm.m * (tm.a * std::cos(tm.m * t) + tm.b * std::sin(tm.m * t));
        return v;
    }
    /// A_gamma(theta) = gamma'' + gamma.
    double a_gamma(double t) const { return d2(t) + value(t); }

private:
    double g2(double t) const {
        const double c = std::cos(t), s = std::sin(t);
        return axes[0] * axes[0] * c * c + axes[1] * axes[1] * s * s;
    }
    double dg2(double t) const {
        return (axes[1] * axes[1] - axes[0] * axes[0]) * std::sin(2.0 * t);
    }
    double ddg2(double t) const {
        return 2.0 * (axes[1] * axes[1] - axes[0] * axes[0]) * std::cos(2.0 * t);
    }
};

inline Gamma1D make_gamma1d(const GammaSpec& spec) {
    if (spec.n != 1) throw Error("make_gamma1d: spec is not one-dimensional");
    Gamma1D g;
    switch (spec.kind) {
        case GammaSpec::Kind::Constant:
            g.a0 = spec.c;
            break;
        case GammaSpec::Kind::Trig:
            g.a0 = spec.a0;
            g.terms = spec.terms;
            break;
        case GammaSpec::Kind::Ellipse:
            if (spec.axes.size() != 2) throw Error("ellipse gamma needs 2 semi-axes for n=1");
            g.axes = spec.axes;
            break;
        case GammaSpec::Kind::Table: {
            const int m = static_cast<int>(spec.table.size());
            if (m < 8) throw Error("gamma table too short");
            Eigen::ArrayXd v(m);
            for (int j = 0; j < m; ++j) v[j] = spec.table[j];
            auto coef = SpectralDiff(m).coefficients(v);
            g.a0 = coef[0].real();
            for (int k = 1; k <= m / 2; ++k) {
                GammaTerm t;
                t.m = k;
                if (2 * k == m) {
                    t.a = coef[k].real();
                    t.b = 0.0;
                } else {
                    t.a = 2.0 * coef[k].real();
                    t.b = -2.0 * coef[k].imag();
                }
                g.terms.push_back(t);
            }
            break;
        }
    }
    return g;
}

/// Continuous evaluator of gamma at an ambient unit direction.
template <int N>
std::function<double(const Eigen::Matrix<double, N + 1, 1>&)> gamma_evaluator(
    const GammaSpec& spec);

template <>
inline std::function<double(const Eigen::Vector2d&)> gamma_evaluator<1>(const GammaSpec& spec) {
    Gamma1D g = make_gamma1d(spec);
    return [g](const Eigen::Vector2d& z) { return g.value(std::atan2(z[1], z[0])); };
}

template <>
inline std::function<double(const Eigen::Vector3d&)> gamma_evaluator<2>(const GammaSpec& spec) {
    switch (spec.kind) {
        case GammaSpec::Kind::Constant: {
            const double c = spec.c;
            return [c](const Eigen::Vector3d&) { return c; };
        }
        case GammaSpec::Kind::Trig: {
            const double a0 = spec.a0;
            const auto terms = spec.terms;
            return [a0, terms](const Eigen::Vector3d& z) {
                double v = a0;
                for (const auto& t : terms) v += t.a * legendre_p(t.m, z[2]);
                return v;
            };
        }
        case GammaSpec::Kind::Ellipse: {
            if (spec.axes.size() != 3) throw Error("ellipse gamma needs 3 semi-axes for n=2");
            const Eigen::Vector3d a(spec.axes[0], spec.axes[1], spec.axes[2]);
            return [a](const Eigen::Vector3d& z) {
                return std::sqrt(a[0] * a[0] * z[0] * z[0] + a[1] * a[1] * z[1] * z[1] +
                                 a[2] * a[2] * z[2] * z[2]);
            };
        }
        case GammaSpec::Kind::Table: {
            const int nlat = spec.table_nlat, nlon = spec.table_nlon;
            if (nlat < 8 || nlon < 8 || static_cast<int>(spec.table.size()) != nlat * nlon)
                throw Error("gamma table dimensions inconsistent");
            auto tab = spec.table;
            return [tab, nlat, nlon](const Eigen::Vector3d& z) {
                const double th = std::acos(std::clamp(z[2], -1.0, 1.0));
                double ph = std::atan2(z[1], z[0]);
                if (ph < 0) ph += 2.0 * M_PI;
                const double dth = M_PI / nlat, dph = 2.0 * M_PI / nlon;
                double fi = th / dth - 0.5, fj = ph / dph;
                int i0 = static_cast<int>(std::floor(fi));
                int j0 = static_cast<int>(std::floor(fj));
                const double wi = fi - i0, wj = fj - j0;
                auto at = [&](int i, int j) {
                    int jj = j % nlon;
                    if (jj < 0) jj += nlon;
                    if (i < 0) {
                        i = -1 - i;
                        jj = (jj + nlon / 2) % nlon;
                    } else if (i >= nlat) {
                        i = 2 * nlat - 1 - i;
                        jj = (jj + nlon / 2) % nlon;
                    }
                    return tab[i * nlon + jj];
                };
                return (1 - wi) * ((1 - wj) * at(i0, j0) + wj * at(i0, j0 + 1)) +
                       wi * ((1 - wj) * at(i0 + 1, j0) + wj * at(i0 + 1, j0 + 1));
            };
        }
    }
    throw Error("unreachable gamma kind");
}

inline GammaSpec parse_gamma_spec(const nlohmann::json& j) {
    GammaSpec s;
    s.n = j.value("n", 1);
    if (s.n != 1 && s.n != 2) throw ParseError("gamma spec: n must be 1 or 2");
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") {
        s.kind = GammaSpec::Kind::Constant;
        s.c = j.value("c", 1.0);
        if (!(s.c > 0)) throw ParseError("gamma spec: constant c must be positive");
    } else if (kind == "trig") {
        s.kind = GammaSpec::Kind::Trig;
        s.a0 = j.value("a0", 1.0);
        if (j.contains("terms"))
            for (const auto& t : j.at("terms")) {
                GammaTerm tm;
                tm.m = t.at("m").get<int>();
                tm.a = t.value("a", 0.0);
                tm.b = t.value("b", 0.0);
                s.terms.push_back(tm);
            }
    } else if (kind == "ellipse") {
        s.kind = GammaSpec::Kind::Ellipse;
        s.axes = j.at("axes").get<std::vector<double>>();
        if (static_cast<int>(s.axes.size()) != s.n + 1)
            throw ParseError("gamma spec: ellipse needs n+1 semi-axes");
    } else if (kind == "table") {
        s.kind = GammaSpec::Kind::Table;
        s.table = j.at("values").get<std::vector<double>>();
        if (s.n == 2) {
            s.table_nlat = j.at("nlat").get<int>();
            s.table_nlon = j.at("nlon").get<int>();
        }
    } else {
        throw ParseError("gamma spec: unknown kind '" + kind + "'");
    }
    if (s.n == 1) {
        s.grid_size = j.value("grid_size", 512);
    } else if (j.contains("grid_size")) {
        auto gs = j.at("grid_size");
        if (gs.is_array() && gs.size() == 2) {
            s.grid_nlat = gs[0].get<int>();
            s.grid_nlon = gs[1].get<int>();
        } else {
            throw ParseError("gamma spec: n=2 grid_size must be [nlat, nlon]");
        }
    } else {
        s.grid_nlat = 96;
        s.grid_nlon = 192;
    }
    return s;
}

inline nlohmann::json gamma_spec_to_json(const GammaSpec& s) {
    nlohmann::json j;
    j["n"] = s.n;
    switch (s.kind) {
        case GammaSpec::Kind::Constant:
            j["kind"] = "constant";
            j["c"] = s.c;
            break;
        case GammaSpec::Kind::Trig: {
            j["kind"] = "trig";
            j["a0"] = s.a0;
            nlohmann::json ts = nlohmann::json::array();
            for (const auto& t : s.terms) ts.push_back({{"m", t.m}, {"a", t.a}, {"b", t.b}});
            j["terms"] = ts;
            break;
        }
        case GammaSpec::Kind::Ellipse:
            j["kind"] = "ellipse";
            j["axes"] = s.axes;
            break;
        case GammaSpec::Kind::Table:
            j["kind"] = "table";
            j["values"] = s.table;
            if (s.n == 2) {
                j["nlat"] = s.table_nlat;
                j["nlon"] = s.table_nlon;
            }
            break;
    }
    if (s.n == 1)
        j["grid_size"] = s.grid_size ? s.grid_size : 512;
    else
        j["grid_size"] = {s.grid_nlat ? s.grid_nlat : 96, s.grid_nlon ? s.grid_nlon : 192};
    return j;
}

}  // namespace wulff
