#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "wulff/anisotropy.hpp"
#include "wulff/errors.hpp"
#include "wulff/grid.hpp"
#include "wulff/optim.hpp"

namespace wulff {

/// Smooth convex body encoded by its isotropic support function sampled at
/// the grid nodes. offset records accumulated translations (bookkeeping
/// only; h is always the support function about the current origin).
template <int N>
struct SupportBody {
    using Grid = SphereGrid<N>;
    using VecA = typename Grid::VecA;

    const Grid* grid = nullptr;
    ArrayXd h;
    VecA offset = VecA::Zero();

    int size() const { return grid->size(); }
};

/// Per-node radii matrix r_ij = Hess h + h sigma in the orthonormal tangent
/// frame; eigenvalues are the principal radii of curvature.
template <int N>
struct RadiiField {
    std::vector<typename SphereGrid<N>::MatT> r;
    ArrayXd min_eig, max_eig, det;
};

struct ConvexReport {
    bool ok = false;
    int worst_node = -1;
    double min_eig = 0.0;
};

template <int N>
SupportBody<N> make_wulff_body(const AnisotropyField<N>& f, double rho = 1.0) {
    SupportBody<N> b;
    b.grid = f.grid;
    b.h = rho * f.gamma;
    return b;
}

/// Support function of the ellipse/ellipsoid with the given semi-axes.
template <int N>
SupportBody<N> make_ellipse_body(const SphereGrid<N>& grid, const std::vector<double>& axes) {
    if (static_cast<int>(axes.size()) != N + 1)
        throw Error("make_ellipse_body: need n+1 semi-axes");
    SupportBody<N> b;
    b.grid = &grid;
    b.h.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double s = 0;
        const auto z = grid.node(i);
        for (int d = 0; d <= N; ++d) s += axes[d] * axes[d] * z[d] * z[d];
        b.h[i] = std::sqrt(s);
    }
    return b;
}

template <int N>
SupportBody<N> translate(const SupportBody<N>& body, const typename SphereGrid<N>::VecA& v) {
    SupportBody<N> out = body;
    for (int i = 0; i < body.size(); ++i) out.h[i] += v.dot(body.grid->node(i));
    out.offset += v;
    return out;
}

template <int N>
RadiiField<N> radii_matrix(const SupportBody<N>& body) {
    RadiiField<N> out;
    const auto& g = *body.grid;
    auto hh = g.hess(body.h);
    const int n = g.size();
    out.r.resize(n);
    out.min_eig.resize(n);
    out.max_eig.resize(n);
    out.det.resize(n);
    for (int i = 0; i < n; ++i) {
        auto m = hh[i];
        for (int d = 0; d < N; ++d) m(d, d) += body.h[i];
        out.r[i] = m;
        detail::eig_bounds<N>(m, out.min_eig[i], out.max_eig[i], out.det[i]);
    }
    return out;
}

template <int N>
ConvexReport check_convex(const SupportBody<N>& body, double margin) {
    RadiiField<N> r = radii_matrix(body);
    return check_convex(r, margin);
}

template <int N>
ConvexReport check_convex(const RadiiField<N>& r, double margin) {
    ConvexReport rep;
    int worst = 0;
    for (int i = 1; i < r.min_eig.size(); ++i)
        if (r.min_eig[i] < r.min_eig[worst]) worst = i;
    rep.worst_node = worst;
    rep.min_eig = r.min_eig[worst];
    rep.ok = rep.min_eig >= margin;
    return rep;
}

namespace detail {
template <int N>
void require_convex(const RadiiField<N>& r, const char* who) {
    ConvexReport rep = check_convex(r, 0.0);
    if (!(rep.min_eig > 0.0))
        throw ConvexityError(std::string(who) + ": radii matrix not positive definite (min eig " +
                                 std::to_string(rep.min_eig) + " at node " +
                                 std::to_string(rep.worst_node) + ")",
                             rep.worst_node, rep.min_eig);
}
}  // namespace detail

/// Enclosed volume, (1/(n+1)) * quad(h det r).
template <int N>
double volume(const SupportBody<N>& body, const RadiiField<N>& r) {
    detail::require_convex(r, "volume");
    return body.grid->quad(body.h * r.det) / (N + 1);
}

template <int N>
double volume(const SupportBody<N>& body) {
    RadiiField<N> r = radii_matrix(body);
    return volume(body, r);
}

/// Anisotropic boundary area |M|_gamma = quad(gamma det r) = V_n(K, W).
template <int N>
double aniso_area(const SupportBody<N>& body, const AnisotropyField<N>& f,
                  const RadiiField<N>& r) {
    detail::require_convex(r, "aniso_area");
    return body.grid->quad(f.gamma * r.det);
}

template <int N>
double aniso_area(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    RadiiField<N> r = radii_matrix(body);
    return aniso_area(body, f, r);
}

/// Anisotropic support function s(z) = h(z)/gamma(z), indexed by the sphere
/// node whose anisotropic normal is phi(z).
template <int N>
ArrayXd anisotropic_support_s(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    return body.h / f.gamma;
}

/// Steiner point, used to seed center searches.
template <int N>
typename SphereGrid<N>::VecA steiner_point(const SupportBody<N>& body) {
    using VecA = typename SphereGrid<N>::VecA;
    const auto& g = *body.grid;
    VecA p = VecA::Zero();
    for (int i = 0; i < g.size(); ++i) p += g.weight(i) * body.h[i] * g.node(i);
    const double kball = (N == 1) ? M_PI : 4.0 * M_PI / 3.0;  // unit-ball volume
    return p / kball;
}

struct InnerOuterRadius {
    double r = 0.0, R = 0.0;
    Eigen::VectorXd inner_center, outer_center;
};

/// Anisotropic inner and outer radius with optimizing centers; the center
/// search is Nelder-Mead seeded at the Steiner point (the minimizing point
/// need not be unique; any optimizer is returned).
template <int N>
InnerOuterRadius inner_outer_radius(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    const auto& g = *body.grid;
    const int n = g.size();
    const auto ratio_min = [&](const Eigen::VectorXd& p) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double dot = 0;
            for (int d = 0; d <= N; ++d) dot += p[d] * g.node(i)[d];
            best = std::min(best, (body.h[i] - dot) / f.gamma[i]);
        }
        return best;
    };
    const auto ratio_max = [&](const Eigen::VectorXd& p) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double dot = 0;
            for (int d = 0; d <= N; ++d) dot += p[d] * g.node(i)[d];
            worst = std::max(worst, (body.h[i] - dot) / f.gamma[i]);
        }
        return worst;
    };
    Eigen::VectorXd seed(N + 1);
    const auto sp = steiner_point(body);
    for (int d = 0; d <= N; ++d) seed[d] = sp[d];
    const double scale = 0.25 * body.h.abs().maxCoeff() + 1e-6;

    auto inner = nelder_mead([&](const Eigen::VectorXd& p) { return -ratio_min(p); }, seed,
                             scale, 1e-9);
    auto outer = nelder_mead(ratio_max, seed, scale, 1e-9);
    InnerOuterRadius out;
    out.r = -inner.value;
    out.R = outer.value;
    out.inner_center = inner.x;
    out.outer_center = outer.x;
    return out;
}

/// W-relative Hausdorff distance via the support-function characterization
/// max |h_a - h_b| / gamma.
template <int N>
double hausdorff_W(const SupportBody<N>& a, const SupportBody<N>& b,
                   const AnisotropyField<N>& f) {
    if (a.grid != b.grid) throw Error("hausdorff_W: bodies on different grids");
    return ((a.h - b.h).abs() / f.gamma).maxCoeff();
}

/// Translation-minimized W-Hausdorff distance to rho W. The translation is
/// optimized numerically from the given seed (default: inner-radius center).
template <int N>
double distance_to_scaled_wulff(const SupportBody<N>& body, const AnisotropyField<N>& f,
                                double rho, const Eigen::VectorXd* seed_center = nullptr,
                                Eigen::VectorXd* out_center = nullptr) {
    const auto& g = *body.grid;
    const int n = g.size();
    const auto obj = [&](const Eigen::VectorXd& p) {
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            double dot = 0;
            for (int d = 0; d <= N; ++d) dot += p[d] * g.node(i)[d];
            worst = std::max(worst, std::abs(body.h[i] - rho * f.gamma[i] - dot) / f.gamma[i]);
        }
        return worst;
    };
    Eigen::VectorXd seed;
    if (seed_center) {
        seed = *seed_center;
    } else {
        seed = inner_outer_radius(body, f).inner_center;
    }
    auto res = nelder_mead(obj, seed, 0.1 * rho + 1e-6, 1e-9);
    if (out_center) *out_center = res.x;
    return res.value;
}

/// Summary of the Wulff shape itself: Vol(W), |Sigma|_gamma and the
/// boundary point map samples.
template <int N>
struct WulffShapeSummary {
    double vol = 0.0;
    double area_gamma = 0.0;
    std::vector<typename SphereGrid<N>::VecA> boundary_points;
};

template <int N>
WulffShapeSummary<N> wulff_summary(const AnisotropyField<N>& f) {
    WulffShapeSummary<N> s;
    SupportBody<N> w = make_wulff_body(f);
    RadiiField<N> r = radii_matrix(w);
    s.vol = volume(w, r);
    s.area_gamma = aniso_area(w, f, r);
    s.boundary_points.resize(f.size());
    for (int i = 0; i < f.size(); ++i) s.boundary_points[i] = wulff_point(f, i);
    return s;
}

}  // namespace wulff
