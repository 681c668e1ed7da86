#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "wulff/body.hpp"
#include "wulff/errors.hpp"

namespace wulff {

/// Convex polytope by vertex list. D = 2 keeps vertices in counterclockwise
/// order; D = 3 precomputes facet planes by brute-force enumeration (desk
/// scale; vertex counts are expected to stay small).
template <int D>
struct PolytopeBody;

template <>
struct PolytopeBody<2> {
    std::vector<Eigen::Vector2d> verts;  // CCW

    explicit PolytopeBody(std::vector<Eigen::Vector2d> vs) : verts(std::move(vs)) {
        if (verts.size() < 3) throw Error("PolytopeBody<2>: need at least 3 vertices");
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        for (const auto& v : verts) c += v;
        c /= static_cast<double>(verts.size());
        std::sort(verts.begin(), verts.end(), [&](const auto& a, const auto& b) {
            return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
        });
        const int m = static_cast<int>(verts.size());
        for (int i = 0; i < m; ++i) {
            const auto& a = verts[i];
            const auto& b = verts[(i + 1) % m];
            const auto& d = verts[(i + 2) % m];
            const double cross = (b - a)[0] * (d - b)[1] - (b - a)[1] * (d - b)[0];
            if (cross <= 1e-14) throw Error("PolytopeBody<2>: vertices not in strict convex position");
        }
        if (area() <= 0) throw Error("PolytopeBody<2>: empty interior");
    }

    int num_edges() const { return static_cast<int>(verts.size()); }
    Eigen::Vector2d edge_a(int e) const { return verts[e]; }
    Eigen::Vector2d edge_b(int e) const { return verts[(e + 1) % verts.size()]; }
    double edge_len(int e) const { return (edge_b(e) - edge_a(e)).norm(); }
    /// Outward unit normal of edge e.
    Eigen::Vector2d edge_normal(int e) const {
        Eigen::Vector2d t = (edge_b(e) - edge_a(e)).normalized();
        return Eigen::Vector2d(t[1], -t[0]);
    }

    double area() const {
        double a = 0;
        const int m = num_edges();
        for (int i = 0; i < m; ++i) {
            const auto& p = verts[i];
            const auto& q = verts[(i + 1) % m];
            a += p[0] * q[1] - q[0] * p[1];
        }
        return 0.5 * a;
    }
    double perimeter() const {
        double p = 0;
        for (int e = 0; e < num_edges(); ++e) p += edge_len(e);
        return p;
    }

    bool contains(const Eigen::Vector2d& x, double tol = 0.0) const {
        const int m = num_edges();
        for (int e = 0; e < m; ++e)
            if (edge_normal(e).dot(x - edge_a(e)) > tol) return false;
        return true;
    }

    double support(const Eigen::Vector2d& z) const {
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& v : verts) s = std::max(s, v.dot(z));
        return s;
    }

    /// Euclidean distance to the boundary from an exterior point (0 inside).
    double euclid_dist(const Eigen::Vector2d& x) const {
        if (contains(x)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (int e = 0; e < num_edges(); ++e) {
            const Eigen::Vector2d a = edge_a(e), b = edge_b(e);
            const Eigen::Vector2d ab = b - a;
            const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
            best = std::min(best, (x - (a + t * ab)).norm());
        }
        return best;
    }

    double shortest_edge() const {
        double s = std::numeric_limits<double>::infinity();
        for (int e = 0; e < num_edges(); ++e) s = std::min(s, edge_len(e));
        return s;
    }
};

template <>
struct PolytopeBody<3> {
    struct Facet {
        Eigen::Vector3d normal;  // outward unit
        double offset;           // <normal, x> <= offset on K
    };
    std::vector<Eigen::Vector3d> verts;
    std::vector<Facet> facets;

    explicit PolytopeBody(std::vector<Eigen::Vector3d> vs) : verts(std::move(vs)) {
        if (verts.size() < 4) throw Error("PolytopeBody<3>: need at least 4 vertices");
        Eigen::Vector3d c = Eigen::Vector3d::Zero();
        for (const auto& v : verts) c += v;
        c /= static_cast<double>(verts.size());
        const int m = static_cast<int>(verts.size());
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int k = j + 1; k < m; ++k) {
                    Eigen::Vector3d n =
                        (verts[j] - verts[i]).cross(verts[k] - verts[i]);
                    const double nn = n.norm();
                    if (nn < 1e-12) continue;
                    n /= nn;
                    double off = n.dot(verts[i]);
                    if (n.dot(c) > off) {
                        n = -n;
                        off = -off;
                    }
                    bool face = true;
                    for (const auto& v : verts)
                        if (n.dot(v) > off + 1e-10) {
                            face = false;
                            break;
                        }
                    if (!face) continue;
                    bool dup = false;
                    for (const auto& f : facets)
                        if ((f.normal - n).norm() < 1e-9 && std::abs(f.offset - off) < 1e-9) {
                            dup = true;
                            break;
                        }
                    if (!dup) facets.push_back({n, off});
                }
        if (facets.size() < 4) throw Error("PolytopeBody<3>: degenerate vertex set");
        for (const auto& f : facets)
            if (f.normal.dot(c) >= f.offset - 1e-12)
                throw Error("PolytopeBody<3>: empty interior");
        // every vertex extreme: it must be the unique maximizer of some facet-
        // adjacent direction; cheap necessary check via support uniqueness
        for (const auto& v : verts) {
            Eigen::Vector3d d = (v - c).normalized();
            double s = support(d);
            if (v.dot(d) < s - 1e-10) throw Error("PolytopeBody<3>: vertex not extreme");
        }
    }

    bool contains(const Eigen::Vector3d& x, double tol = 0.0) const {
        for (const auto& f : facets)
            if (f.normal.dot(x) > f.offset + tol) return false;
        return true;
    }

    double support(const Eigen::Vector3d& z) const {
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& v : verts) s = std::max(s, v.dot(z));
        return s;
    }

    /// Lower bound on the Euclidean distance (max halfspace violation).
    double euclid_dist_lower(const Eigen::Vector3d& x) const {
        double d = 0.0;
        for (const auto& f : facets) d = std::max(d, f.normal.dot(x) - f.offset);
        return d;
    }

    /// Euclidean projection onto K by cyclic Dykstra over the facet
    /// halfspaces.
    Eigen::Vector3d euclid_project(const Eigen::Vector3d& x) const {
        if (contains(x)) return x;
        Eigen::Vector3d p = x;
        std::vector<Eigen::Vector3d> corr(facets.size(), Eigen::Vector3d::Zero());
        for (int sweep = 0; sweep < 400; ++sweep) {
            double moved = 0;
            for (std::size_t i = 0; i < facets.size(); ++i) {
                Eigen::Vector3d y = p + corr[i];
                const double viol = facets[i].normal.dot(y) - facets[i].offset;
                Eigen::Vector3d pn = (viol > 0) ? Eigen::Vector3d(y - viol * facets[i].normal)
                                                : y;
                corr[i] = y - pn;
                moved = std::max(moved, (pn - p).norm());
                p = pn;
            }
            if (moved < 1e-13) break;
        }
        return p;
    }
};

/// Sample of the polytope support function on a sphere grid. Not strictly
/// convex: the node values are exact, but the sampled field is outside the
/// strict-convexity preconditions of the smooth-body operations; it exists
/// for Minkowski-sum bookkeeping (h_{K + eps W} = h_K + eps gamma at nodes).
template <int D>
SupportBody<D - 1> polytope_support(const PolytopeBody<D>& p, const SphereGrid<D - 1>& grid) {
    SupportBody<D - 1> b;
    b.grid = &grid;
    b.h.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        typename SphereGrid<D - 1>::VecA z = grid.node(i);
        b.h[i] = p.support(z);
    }
    return b;
}

/// Radii for the vertex representation: the support samples at the grid
/// nodes are exact, so the center search runs on the sampled field.
template <int D>
InnerOuterRadius inner_outer_radius(const PolytopeBody<D>& p,
                                    const AnisotropyField<D - 1>& f) {
    return inner_outer_radius(polytope_support(p, *f.grid), f);
}

inline PolytopeBody<2> make_unit_square() {
    return PolytopeBody<2>({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

inline PolytopeBody<2> make_regular_polygon(int m, double circumradius = 1.0,
                                            double phase = 0.0) {
    std::vector<Eigen::Vector2d> vs;
    for (int i = 0; i < m; ++i) {
        const double t = phase + 2.0 * M_PI * i / m;
        vs.emplace_back(circumradius * std::cos(t), circumradius * std::sin(t));
    }
    return PolytopeBody<2>(std::move(vs));
}

inline PolytopeBody<3> make_unit_cube() {
    std::vector<Eigen::Vector3d> vs;
    for (int i = 0; i < 8; ++i)
        vs.emplace_back(static_cast<double>(i & 1), static_cast<double>((i >> 1) & 1),
                        static_cast<double>((i >> 2) & 1));
    return PolytopeBody<3>(std::move(vs));
}

}  // namespace wulff
