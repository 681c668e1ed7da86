#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wulff/anisotropy.hpp"
#include "wulff/curvature.hpp"
#include "wulff/errors.hpp"
#include "wulff/polytope.hpp"
#include "wulff/random_body.hpp"
#include "wulff/threads.hpp"

namespace wulff {

/// Testable region family for the curvature measures (membership must be
/// exactly decidable per sample).
template <int D>
struct RegionSpec {
    enum class Kind { AllSpace, Ball, Box } kind = Kind::AllSpace;
    Eigen::Matrix<double, D, 1> center = Eigen::Matrix<double, D, 1>::Zero();
    double radius = 0.0;
    Eigen::Matrix<double, D, 1> lo = Eigen::Matrix<double, D, 1>::Zero();
    Eigen::Matrix<double, D, 1> hi = Eigen::Matrix<double, D, 1>::Zero();

    static RegionSpec all() { return RegionSpec{}; }
    static RegionSpec ball(const Eigen::Matrix<double, D, 1>& c, double r) {
        if (!(r > 0)) throw Error("RegionSpec: ball radius must be positive");
        RegionSpec s;
        s.kind = Kind::Ball;
        s.center = c;
        s.radius = r;
        return s;
    }
    static RegionSpec box(const Eigen::Matrix<double, D, 1>& lo,
                          const Eigen::Matrix<double, D, 1>& hi) {
        for (int d = 0; d < D; ++d)
            if (!(lo[d] < hi[d])) throw Error("RegionSpec: box needs lo < hi componentwise");
        RegionSpec s;
        s.kind = Kind::Box;
        s.lo = lo;
        s.hi = hi;
        return s;
    }

    bool contains(const Eigen::Matrix<double, D, 1>& x) const {
        switch (kind) {
            case Kind::AllSpace: return true;
            case Kind::Ball: return (x - center).norm() <= radius;
            case Kind::Box:
                for (int d = 0; d < D; ++d)
                    if (x[d] < lo[d] || x[d] > hi[d]) return false;
                return true;
        }
        return false;
    }
};

template <int D>
RegionSpec<D> parse_region(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "all");
    if (kind == "all" || kind == "all-space") return RegionSpec<D>::all();
    if (kind == "ball") {
        auto c = j.at("center").get<std::vector<double>>();
        if (static_cast<int>(c.size()) != D) throw ParseError("region: center dimension");
        Eigen::Matrix<double, D, 1> cv;
        for (int d = 0; d < D; ++d) cv[d] = c[d];
        return RegionSpec<D>::ball(cv, j.at("radius").get<double>());
    }
    if (kind == "box") {
        auto lo = j.at("lo").get<std::vector<double>>();
        auto hi = j.at("hi").get<std::vector<double>>();
        if (static_cast<int>(lo.size()) != D || static_cast<int>(hi.size()) != D)
            throw ParseError("region: box dimension");
        Eigen::Matrix<double, D, 1> lov, hiv;
        for (int d = 0; d < D; ++d) {
            lov[d] = lo[d];
            hiv[d] = hi[d];
        }
        return RegionSpec<D>::box(lov, hiv);
    }
    throw ParseError("region: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// anisotropic metric projection
// ---------------------------------------------------------------------------

template <int D>
struct Projection {
    Eigen::Matrix<double, D, 1> foot;
    Eigen::Matrix<double, D, 1> direction;  // gamma^0-unit; undefined inside
    double dist = 0.0;
    bool interior = false;
};

namespace detail {

// exact 2-D projection: per-edge golden section of gamma^0(x - q(t))
template <typename Gauge>
Projection<2> project_polygon(const PolytopeBody<2>& K, const Gauge& gauge,
                              const Eigen::Vector2d& x, double gauge_min, double tol) {
    Projection<2> out;
    if (K.contains(x)) {
        out.foot = x;
        out.direction = Eigen::Vector2d::Zero();
        out.dist = 0.0;
        out.interior = true;
        return out;
    }
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector2d bestq = K.verts[0];
    for (int e = 0; e < K.num_edges(); ++e) {
        const Eigen::Vector2d a = K.edge_a(e), b = K.edge_b(e);
        const Eigen::Vector2d ab = b - a;
        // euclidean lower bound prunes edges that cannot improve
        const double t0 = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        const double lower = (x - (a + t0 * ab)).norm() * gauge_min;
        if (lower >= best) continue;
        const auto f = [&](double t) { return gauge(Eigen::Vector2d(x - a - t * ab)); };
        double ts = golden_min(f, 0.0, 1.0, std::max(tol, 1e-7));
        if (tol < 1e-9) {
            // polish the argmin past the sqrt(eps) limit of value-only search:
            // Newton on the finite-difference derivative
            const double h = 1e-6;
            for (int it = 0; it < 3; ++it) {
                const double fp = f(ts + h), fm = f(ts - h), f0 = f(ts);
                const double d1 = (fp - fm) / (2 * h);
                const double d2 = (fp - 2 * f0 + fm) / (h * h);
                if (!(d2 > 0)) break;
                ts = std::clamp(ts - d1 / d2, 0.0, 1.0);
            }
        }
        double vt = f(ts);
        Eigen::Vector2d qt = a + ts * ab;
        for (double tend : {0.0, 1.0}) {  // endpoints
            const double ve = f(tend);
            if (ve < vt) {
                vt = ve;
                qt = a + tend * ab;
            }
        }
        if (vt < best) {
            best = vt;
            bestq = qt;
        }
    }
    out.foot = bestq;
    out.dist = best;
    out.direction = (x - bestq) / best;
    out.interior = false;
    return out;
}

// 3-D projection by projected gradient descent with backtracking; the
// gradient of gamma^0(x - q) is formed by central differences.
template <typename Gauge>
Projection<3> project_polytope(const PolytopeBody<3>& K, const Gauge& gauge,
                               const Eigen::Vector3d& x, double stop_tol) {
    Projection<3> out;
    if (K.contains(x)) {
        out.foot = x;
        out.direction = Eigen::Vector3d::Zero();
        out.dist = 0.0;
        out.interior = true;
        return out;
    }
    Eigen::Vector3d q = K.euclid_project(x);
    double fq = gauge(Eigen::Vector3d(x - q));
    double step = 0.5 * fq;
    const double h = 1e-6;
    for (int it = 0; it < 300; ++it) {
        Eigen::Vector3d grad;
        for (int d = 0; d < 3; ++d) {
            Eigen::Vector3d dp = Eigen::Vector3d::Zero();
            dp[d] = h;
            grad[d] = (gauge(Eigen::Vector3d(x - q - dp)) - gauge(Eigen::Vector3d(x - q + dp))) /
                      (2 * h);
        }
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            Eigen::Vector3d cand = K.euclid_project(q - step * grad);
            const double fc = gauge(Eigen::Vector3d(x - cand));
            if (fc < fq - 1e-16) {
                const double moved = (cand - q).norm();
                q = cand;
                fq = fc;
                improved = true;
                step *= 1.5;
                if (moved < stop_tol) it = 300;
                break;
            }
            step *= 0.5;
        }
        if (!improved && step < stop_tol) break;
    }
    out.foot = q;
    out.dist = fq;
    out.direction = (x - q) / fq;
    out.interior = false;
    return out;
}

}  // namespace detail

/// f_K(x), v_K(x) and d_W(K, x). 2-D is exact (edge/vertex candidates with
/// golden-section refinement); 3-D runs projected gradient descent with a
/// 1e-10 stopping threshold.
inline Projection<2> metric_projection(const PolytopeBody<2>& K, const AnisotropyField<1>& f,
                                       const Eigen::Vector2d& x) {
    const auto gauge = [&](const Eigen::Vector2d& z) { return gamma0(f, z); };
    return detail::project_polygon(K, gauge, x, 0.0, 1e-12);
}

inline Projection<3> metric_projection(const PolytopeBody<3>& K, const AnisotropyField<2>& f,
                                       const Eigen::Vector3d& x) {
    const auto gauge = [&](const Eigen::Vector3d& z) { return gamma0(f, z); };
    return detail::project_polytope(K, gauge, x, 1e-10);
}

// ---------------------------------------------------------------------------
// local parallel volumes (stratified Monte Carlo)
// ---------------------------------------------------------------------------

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

namespace detail {

template <int D>
void parallel_bbox(const PolytopeBody<D>& K,
                   const std::function<double(const Eigen::Matrix<double, D, 1>&)>& gamma_of,
                   double eps, Eigen::Matrix<double, D, 1>& lo,
                   Eigen::Matrix<double, D, 1>& hi) {
    for (int d = 0; d < D; ++d) {
        Eigen::Matrix<double, D, 1> e = Eigen::Matrix<double, D, 1>::Zero();
        e[d] = 1.0;
        hi[d] = K.support(e) + eps * gamma_of(e) + 1e-12;
        e[d] = -1.0;
        lo[d] = -(K.support(e) + eps * gamma_of(e)) - 1e-12;
    }
}

template <int D, typename Gauge>
bool shell_hit(const PolytopeBody<D>& K, const Gauge& gauge, const RegionSpec<D>& region,
               double eps, const Eigen::Matrix<double, D, 1>& x, double gmin, double gmax) {
    if (K.contains(x)) return false;  // d_W = 0, shell is half-open
    double delow;
    if constexpr (D == 2)
        delow = K.euclid_dist(x);
    else
        delow = K.euclid_dist_lower(x);
    if (delow * gmin > eps) return false;
    if constexpr (D == 2) {
        if (region.kind == RegionSpec<2>::Kind::AllSpace && delow * gmax <= eps) return true;
        auto pr = detail::project_polygon(K, gauge, x, gmin, 1e-6);
        return pr.dist <= eps && region.contains(pr.foot);
    } else {
        auto pr = detail::project_polytope(K, gauge, x, 1e-8);
        return pr.dist <= eps && region.contains(pr.foot);
    }
}

}  // namespace detail

/// Monte Carlo estimate of L^{D}(A_eps(K, region)) by stratified sampling
/// of the bounding box of K + eps W. Deterministic for a given seed,
/// independent of the worker count (per-stratum substreams, fixed-order
/// reduction).
template <int D>
McEstimate local_parallel_volume(const PolytopeBody<D>& K, const AnisotropyField<D - 1>& f,
                                 const RegionSpec<D>& region, double eps, long samples,
                                 std::uint64_t seed, int workers = 0) {
    if (!(eps > 0)) throw Error("local_parallel_volume: eps must be positive");
    GaugeAccel<D - 1> gauge(f);
    Eigen::Matrix<double, D, 1> lo, hi;
    detail::parallel_bbox<D>(K, [&](const auto& z) { return f.gamma_of(z); }, eps, lo, hi);

    const int per_axis = (D == 2) ? 64 : 16;
    int strata = 1;
    for (int d = 0; d < D; ++d) strata *= per_axis;
    const long base = samples / strata;
    const long rem = samples % strata;
    Eigen::Matrix<double, D, 1> cell = (hi - lo) / per_axis;
    double cell_vol = 1.0;
    for (int d = 0; d < D; ++d) cell_vol *= cell[d];

    std::vector<double> hits(strata, 0.0), counts(strata, 0.0);
    const double gmin = gauge.dir_min(), gmax = gauge.dir_max();
    parallel_chunks(strata, resolve_workers(workers), [&](int s) {
        RandomStream rng = substream(seed, static_cast<std::uint64_t>(s));
        Eigen::Matrix<double, D, 1> corner;
        int rest = s;
        for (int d = 0; d < D; ++d) {
            corner[d] = lo[d] + (rest % per_axis) * cell[d];
            rest /= per_axis;
        }
        const long n_s = base + (s < rem ? 1 : 0);
        long h = 0;
        for (long k = 0; k < n_s; ++k) {
            Eigen::Matrix<double, D, 1> x;
            for (int d = 0; d < D; ++d) x[d] = corner[d] + rng.next_unit() * cell[d];
            if (detail::shell_hit<D>(K, gauge, region, eps, x, gmin, gmax)) ++h;
        }
        hits[s] = static_cast<double>(h);
        counts[s] = static_cast<double>(n_s);
    });

    McEstimate out;
    double var = 0.0;
    for (int s = 0; s < strata; ++s) {
        if (counts[s] == 0) continue;
        const double p = hits[s] / counts[s];
        out.value += cell_vol * p;
        var += cell_vol * cell_vol * p * (1.0 - p) / counts[s];
        out.samples += static_cast<long>(counts[s]);
    }
    out.std_error = std::sqrt(var);
    return out;
}

/// Default eps grid: 8 log-spaced values in [eps_max/30, eps_max] with
/// eps_max = shortest edge / 4, keeping local wedges non-interacting.
inline std::vector<double> default_eps_grid(const PolytopeBody<2>& K, int count = 8) {
    const double emax = K.shortest_edge() / 4.0;
    const double emin = emax / 30.0;
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(emin * std::pow(emax / emin, static_cast<double>(i) / (count - 1)));
    return out;
}

// ---------------------------------------------------------------------------
// Steiner fits
// ---------------------------------------------------------------------------

struct SteinerFit {
    std::vector<double> eps;
    std::vector<double> volumes;
    std::vector<double> std_errors;
    Eigen::VectorXd phi;     // Phi_0 .. Phi_n
    Eigen::VectorXd phi_se;  // propagated Monte Carlo standard errors
    double residual = 0.0;   // max |model - measured|
    double condition = 0.0;
};

namespace detail {

inline double binomial(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// weighted least squares of vols against the local Steiner polynomial
inline SteinerFit steiner_solve(int n, const std::vector<double>& eps,
                                const std::vector<double>& vols,
                                const std::vector<double>& errs) {
    const int rows = static_cast<int>(eps.size());
    const int cols = n + 1;
    if (rows < cols) throw Error("steiner fit: need at least n+1 eps values");
    Eigen::MatrixXd A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int r = 0; r <= n; ++r)
            A(i, r) = binomial(n + 1, r) * std::pow(eps[i], n + 1 - r) / (n + 1);
    Eigen::VectorXd b(rows), w(rows);
    double emax = 0;
    for (int i = 0; i < rows; ++i) emax = std::max(emax, errs.empty() ? 0.0 : errs[i]);
    for (int i = 0; i < rows; ++i) {
        b[i] = vols[i];
        const double sigma = errs.empty() ? 1.0 : std::max(errs[i], 1e-6 * emax + 1e-300);
        w[i] = (emax > 0) ? 1.0 / sigma : 1.0;
    }
    Eigen::MatrixXd Aw = w.asDiagonal() * A;
    Eigen::VectorXd bw = w.asDiagonal() * b;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(cols - 1);
    if (!(cond < 1e8))
        throw IllConditionedFitError("steiner fit: eps grid condition number " +
                                         std::to_string(cond),
                                     cond);
    SteinerFit fit;
    fit.eps = eps;
    fit.volumes = vols;
    fit.std_errors = errs;
    fit.phi = svd.solve(bw);
    fit.condition = cond;
    Eigen::MatrixXd cov = (Aw.transpose() * Aw).inverse();
    fit.phi_se.resize(cols);
    for (int r = 0; r <= n; ++r) fit.phi_se[r] = std::sqrt(std::max(0.0, cov(r, r)));
    for (int i = 0; i < rows; ++i)
        fit.residual = std::max(fit.residual, std::abs((A.row(i) * fit.phi)(0) - b[i]));
    return fit;
}

}  // namespace detail

/// Local anisotropic curvature measures by Monte Carlo shell volumes at the
/// given eps grid plus a weighted least-squares Steiner-polynomial fit.
template <int D>
SteinerFit steiner_fit_local(const PolytopeBody<D>& K, const AnisotropyField<D - 1>& f,
                             const RegionSpec<D>& region, const std::vector<double>& eps_grid,
                             long samples, std::uint64_t seed, int workers = 0) {
    if (static_cast<int>(eps_grid.size()) < D + 1)
        throw Error("steiner_fit_local: eps grid needs at least n+2 values");
    std::vector<double> vols, errs;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        auto est = local_parallel_volume(K, f, region, eps_grid[i], samples,
                                         seed + 7919 * i, workers);
        vols.push_back(est.value);
        errs.push_back(est.std_error);
    }
    return detail::steiner_solve(D - 1, eps_grid, vols, errs);
}

// ---------------------------------------------------------------------------
// exact parallel volumes (deterministic paths)
// ---------------------------------------------------------------------------

namespace detail {

// arcs of the polygon normal fan: vertex -> [psi_prev, psi_next]
struct NormalArc {
    Eigen::Vector2d vertex;
    double a, b;  // normal angle range, b > a
};

inline std::vector<NormalArc> normal_fan(const PolytopeBody<2>& K) {
    const int m = K.num_edges();
    std::vector<double> psi(m);
    for (int e = 0; e < m; ++e) {
        const auto n = K.edge_normal(e);
        psi[e] = std::atan2(n[1], n[0]);
    }
    std::vector<NormalArc> arcs;
    for (int e = 0; e < m; ++e) {
        // vertex between edge e-1 and edge e
        const int ep = (e - 1 + m) % m;
        double a = psi[ep], b = psi[e];
        if (b <= a) b += 2.0 * M_PI;
        arcs.push_back({K.edge_a(e), a, b});
    }
    return arcs;
}

inline double simpson_arc(const std::function<double(double)>& fn, double a, double b) {
    const int n = 512;  // panels (even)
    double s = fn(a) + fn(b);
    const double h = (b - a) / n;
    for (int i = 1; i < n; ++i) s += fn(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace detail

/// Exact area of the outer parallel body K + eps W of a convex polygon:
/// the surface-area measure of the sum splits into the edge atoms and the
/// absolutely continuous A_gamma dtheta part, so
/// A(eps) = A(K) + eps/2 (sum_e gamma(n_e) L_e + int h_K A_gamma) +
///          eps^2/2 int gamma A_gamma.
inline double polygon_parallel_area(const PolytopeBody<2>& K, const AnisotropyField<1>& f,
                                    double eps) {
    const Gamma1D& g1 = f.gamma1d;
    double edge_term = 0.0;
    for (int e = 0; e < K.num_edges(); ++e) {
        const auto n = K.edge_normal(e);
        edge_term += g1.value(std::atan2(n[1], n[0])) * K.edge_len(e);
    }
    double h_term = 0.0;
    for (const auto& arc : detail::normal_fan(K)) {
        h_term += detail::simpson_arc(
            [&](double t) {
                return (arc.vertex[0] * std::cos(t) + arc.vertex[1] * std::sin(t)) *
                       g1.a_gamma(t);
            },
            arc.a, arc.b);
    }
    const double gA =
        detail::simpson_arc([&](double t) { return g1.value(t) * g1.a_gamma(t); }, 0.0,
                            2.0 * M_PI);
    return K.area() + 0.5 * eps * (edge_term + h_term) + 0.5 * eps * eps * gA;
}

/// Deterministic global Steiner fit: evaluates Vol(K + eps W) exactly via
/// support addition and fits the degree-(n+1) polynomial; coefficients map
/// to the full mixed-volume vector V_0..V_{n+1}.
template <int N>
MixedVolumes steiner_fit_global(const SupportBody<N>& body, const AnisotropyField<N>& f,
                                const std::vector<double>& eps_grid, double* residual = nullptr) {
    if (static_cast<int>(eps_grid.size()) < N + 2)
        throw Error("steiner_fit_global: eps grid needs at least n+2 values");
    const int rows = static_cast<int>(eps_grid.size());
    const int cols = N + 2;
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
        SupportBody<N> par = body;
        par.h += eps_grid[i] * f.gamma;
        b[i] = volume(par);
        for (int k = 0; k <= N + 1; ++k)
            A(i, k) = detail::binomial(N + 1, k) * std::pow(eps_grid[i], N + 1 - k) / (N + 1);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(cols - 1);
    if (!(cond < 1e8))
        throw IllConditionedFitError("steiner_fit_global: condition number " +
                                         std::to_string(cond),
                                     cond);
    Eigen::VectorXd vk = svd.solve(b);
    if (residual) {
        *residual = 0.0;
        for (int i = 0; i < rows; ++i)
            *residual = std::max(*residual, std::abs((A.row(i) * vk)(0) - b[i]));
    }
    MixedVolumes mv;
    mv.n = N;
    mv.V.assign(N + 2, 0.0);
    for (int k = 0; k <= N + 1; ++k) mv.V[k] = vk[k];
    return mv;
}

/// Same fit for a convex polygon (2-D): the parallel areas are evaluated by
/// the exact normal-fan formula. Three-dimensional polytopes are outside
/// the deterministic path (the edge integrals amount to closed-form 3-D
/// curvature measures); use the Monte Carlo local fit for those.
inline MixedVolumes steiner_fit_global(const PolytopeBody<2>& K, const AnisotropyField<1>& f,
                                       const std::vector<double>& eps_grid,
                                       double* residual = nullptr) {
    if (static_cast<int>(eps_grid.size()) < 3)
        throw Error("steiner_fit_global: eps grid needs at least n+2 values");
    const int rows = static_cast<int>(eps_grid.size());
    Eigen::MatrixXd A(rows, 3);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
        b[i] = polygon_parallel_area(K, f, eps_grid[i]);
        for (int k = 0; k <= 2; ++k)
            A(i, k) = detail::binomial(2, k) * std::pow(eps_grid[i], 2 - k) / 2.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(2);
    if (!(cond < 1e8))
        throw IllConditionedFitError("steiner_fit_global: condition number " +
                                         std::to_string(cond),
                                     cond);
    Eigen::VectorXd vk = svd.solve(b);
    if (residual) {
        *residual = 0.0;
        for (int i = 0; i < rows; ++i)
            *residual = std::max(*residual, std::abs((A.row(i) * vk)(0) - b[i]));
    }
    MixedVolumes mv;
    mv.n = 1;
    mv.V = {vk[0], vk[1], vk[2]};
    return mv;
}

// ---------------------------------------------------------------------------
// weak continuity probe and volume-via-reach check
// ---------------------------------------------------------------------------

struct ProbeRow {
    int vertices = 0;
    std::vector<double> phi;  // Phi_0 .. Phi_n
};

/// Curvature measures of an approximating polygon sequence; with the
/// all-space region this uses the exact deterministic path, otherwise the
/// Monte Carlo local fit.
inline std::vector<ProbeRow> weak_continuity_probe(const std::vector<PolytopeBody<2>>& seq,
                                                   const AnisotropyField<1>& f,
                                                   const RegionSpec<2>& region,
                                                   long samples = 200000,
                                                   std::uint64_t seed = 1) {
    std::vector<ProbeRow> rows;
    for (const auto& K : seq) {
        ProbeRow row;
        row.vertices = static_cast<int>(K.verts.size());
        if (region.kind == RegionSpec<2>::Kind::AllSpace) {
            auto mv = steiner_fit_global(K, f, default_eps_grid(K));
            row.phi = {mv.V[0], mv.V[1]};
        } else {
            auto fit = steiner_fit_local(K, f, region, default_eps_grid(K), samples, seed);
            row.phi = {fit.phi[0], fit.phi[1]};
        }
        rows.push_back(row);
    }
    return rows;
}

/// For K = rho W the anisotropic interior reach is constant rho; evaluates
/// the alternating-sum volume representation with Phi_i from curvature
/// quadrature and returns the absolute discrepancy against Vol(rho W).
template <int N>
double volume_via_reach_check(double rho, const AnisotropyField<N>& f) {
    if (!(rho > 0)) throw Error("volume_via_reach_check: rho must be positive");
    SupportBody<N> body = make_wulff_body(f, rho);
    auto mv = mixed_volumes(body, f);
    double acc = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double sign = ((N - i) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * detail::binomial(N + 1, i) * std::pow(rho, N + 1 - i) * mv.V[i];
    }
    acc /= (N + 1);
    return std::abs(acc - volume(body));
}

}  // namespace wulff
