#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "wulff/anisotropy.hpp"
#include "wulff/body.hpp"
#include "wulff/errors.hpp"

namespace wulff {

/// Anisotropic and isotropic principal curvatures per node, plus the
/// normalized symmetric means E_0..E_n of the anisotropic ones.
template <int N>
struct CurvatureField {
    std::vector<typename SphereGrid<N>::VecT> kappa;   // ascending
    std::vector<typename SphereGrid<N>::VecT> lambda;  // ascending
    std::vector<ArrayXd> E;                            // E[0] == 1, .., E[N]
    ArrayXd det_r;
    double kappa_min = 0, kappa_max = 0;
};

/// V_0..V_{n+1}; V_{n+1} = (n+1)Vol(K), V_0 = (n+1)Vol(W).
struct MixedVolumes {
    std::vector<double> V;
    int n = 1;
};

namespace detail {

// Eigenvalues of the symmetric-definite pencil A u = kappa R u via Cholesky
// of R; both matrices SPD, so the output is real positive.
inline void pencil_eigs(const Eigen::Matrix<double, 1, 1>& a, const Eigen::Matrix<double, 1, 1>& r,
                        Eigen::Matrix<double, 1, 1>& k) {
    k(0, 0) = a(0, 0) / r(0, 0);
}

inline void pencil_eigs(const Eigen::Matrix2d& a, const Eigen::Matrix2d& r,
                        Eigen::Vector2d& k) {
    const Eigen::LLT<Eigen::Matrix2d> llt(r);
    const Eigen::Matrix2d l = llt.matrixL();
    Eigen::Matrix2d b = l.triangularView<Eigen::Lower>().solve(a);
    b = l.triangularView<Eigen::Lower>().solve(Eigen::Matrix2d(b.transpose()));
    const double tr = 0.5 * (b(0, 0) + b(1, 1));
    const double d = 0.5 * (b(0, 0) - b(1, 1));
    const double off = 0.5 * (b(0, 1) + b(1, 0));
    const double rad = std::sqrt(d * d + off * off);
    k[0] = tr - rad;
    k[1] = tr + rad;
}

}  // namespace detail

/// Anisotropic principal curvatures: eigenvalues of A_gamma u = kappa r u.
template <int N>
CurvatureField<N> aniso_curvatures(const SupportBody<N>& body, const AnisotropyField<N>& f,
                                   const RadiiField<N>& r) {
    detail::require_convex(r, "aniso_curvatures");
    const int n = body.size();
    CurvatureField<N> c;
    c.kappa.resize(n);
    c.lambda.resize(n);
    c.E.assign(N + 1, ArrayXd(n));
    c.det_r = r.det;
    c.kappa_min = std::numeric_limits<double>::infinity();
    c.kappa_max = 0;
    for (int i = 0; i < n; ++i) {
        if constexpr (N == 1) {
            const double k = f.a_gamma[i](0, 0) / r.r[i](0, 0);
            c.kappa[i][0] = k;
            c.lambda[i][0] = 1.0 / r.r[i](0, 0);
            c.E[0][i] = 1.0;
            c.E[1][i] = k;
            c.kappa_min = std::min(c.kappa_min, k);
            c.kappa_max = std::max(c.kappa_max, k);
        } else {
            Eigen::Vector2d k;
            detail::pencil_eigs(f.a_gamma[i], r.r[i], k);
            c.kappa[i] = k;
            c.lambda[i][0] = 1.0 / r.max_eig[i];
            c.lambda[i][1] = 1.0 / r.min_eig[i];
            c.E[0][i] = 1.0;
            c.E[1][i] = 0.5 * (k[0] + k[1]);
            c.E[2][i] = k[0] * k[1];
            c.kappa_min = std::min(c.kappa_min, k[0]);
            c.kappa_max = std::max(c.kappa_max, k[1]);
        }
    }
    return c;
}

template <int N>
CurvatureField<N> aniso_curvatures(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    RadiiField<N> r = radii_matrix(body);
    return aniso_curvatures(body, f, r);
}

/// Mixed volumes by curvature quadrature: V_{n+1-k} = quad(E_{k-1} dmu_gamma).
template <int N>
MixedVolumes mixed_volumes(const SupportBody<N>& body, const AnisotropyField<N>& f,
                           const RadiiField<N>& r, const CurvatureField<N>& c) {
    MixedVolumes mv;
    mv.n = N;
    mv.V.assign(N + 2, 0.0);
    const ArrayXd dmu = f.gamma * r.det;  // anisotropic area element
    mv.V[N + 1] = body.grid->quad(body.h * r.det);
    for (int k = 1; k <= N; ++k) mv.V[N + 1 - k] = body.grid->quad(c.E[k - 1] * dmu);
    mv.V[0] = body.grid->quad(c.E[N] * dmu);
    return mv;
}

template <int N>
MixedVolumes mixed_volumes(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    RadiiField<N> r = radii_matrix(body);
    CurvatureField<N> c = aniso_curvatures(body, f, r);
    return mixed_volumes(body, f, r, c);
}

/// Isoperimetric ratio I_l = V_l^{n+1} / (V_{n+1}^l V_0^{n+1-l}) >= 1.
inline double iso_ratio(const MixedVolumes& mv, int l) {
    const int n = mv.n;
    if (l < 1 || l > n) throw Error("iso_ratio: need 1 <= l <= n");
    return std::exp((n + 1) * std::log(mv.V[l]) - l * std::log(mv.V[n + 1]) -
                    (n + 1 - l) * std::log(mv.V[0]));
}

template <int N>
double iso_ratio(const SupportBody<N>& body, const AnisotropyField<N>& f, int l) {
    return iso_ratio(mixed_volumes(body, f), l);
}

/// Residual of the anisotropic Minkowski formula,
/// quad((E_{r-1} - s E_r) dmu_gamma); vanishes in the continuum.
template <int N>
double minkowski_residual(const SupportBody<N>& body, const AnisotropyField<N>& f, int r) {
    if (r < 1 || r > N) throw Error("minkowski_residual: need 1 <= r <= n");
    RadiiField<N> rad = radii_matrix(body);
    CurvatureField<N> c = aniso_curvatures(body, f, rad);
    const ArrayXd s = anisotropic_support_s(body, f);
    const ArrayXd dmu = f.gamma * rad.det;
    return body.grid->quad((c.E[r - 1] - s * c.E[r]) * dmu);
}

/// Heintze-Karcher slack, quad((gamma / E_1) det r) - (n+1) Vol(K) >= 0,
/// zero exactly on scaled Wulff shapes.
template <int N>
double heintze_karcher_slack(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    RadiiField<N> rad = radii_matrix(body);
    CurvatureField<N> c = aniso_curvatures(body, f, rad);
    const double lhs = body.grid->quad((f.gamma / c.E[1]) * rad.det);
    return lhs - body.grid->quad(body.h * rad.det);
}

struct AfSlack {
    int i = 0, j = 0, k = 0;
    double slack = 0.0;  // log-form slack, >= 0 in the continuum
};

/// Alexandrov-Fenchel log-slacks for all 0 <= i < j < k <= n+1:
/// (k-i) log V_{n+1-j} - (k-j) log V_{n+1-i} - (j-i) log V_{n+1-k}.
inline std::vector<AfSlack> af_slacks(const MixedVolumes& mv) {
    std::vector<AfSlack> out;
    const int n = mv.n;
    for (int i = 0; i <= n + 1; ++i)
        for (int j = i + 1; j <= n + 1; ++j)
            for (int k = j + 1; k <= n + 1; ++k) {
                AfSlack s;
                s.i = i;
                s.j = j;
                s.k = k;
                s.slack = (k - i) * std::log(mv.V[n + 1 - j]) -
                          (k - j) * std::log(mv.V[n + 1 - i]) -
                          (j - i) * std::log(mv.V[n + 1 - k]);
                out.push_back(s);
            }
    return out;
}

template <int N>
std::vector<AfSlack> af_slacks(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    return af_slacks(mixed_volumes(body, f));
}

/// Cross-check of the two curvature pipelines: the radii tensor
/// tau[s] = nabla nabla s + gbar s - Q grad s / 2 built on the Wulff curve
/// from the anisotropic support function, against the reciprocals of the
/// anisotropic principal curvatures from the sphere parametrization.
/// Returns the max relative gap over nodes. Implemented for n = 1; the
/// sphere-parametrized radii (r A_gamma^{-1}) cover all n elsewhere.
template <int N>
double tau_cross_check(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    if constexpr (N != 1) {
        throw UnsupportedError("tau_cross_check: implemented for n = 1");
    } else {
        if (!f.q_available)
            throw QUnavailableError("tau_cross_check: Q data not materialized on the field");
        RadiiField<1> rad = radii_matrix(body);
        detail::require_convex(rad, "tau_cross_check");
        const auto& g = *body.grid;
        const ArrayXd s = anisotropic_support_s(body, f);
        const ArrayXd s1 = g.d1(s);
        const ArrayXd s2 = g.d2(s);
        const ArrayXd& m = f.qdata.m;
        const ArrayXd& mp = f.qdata.m_prime;
        double gap = 0;
        for (int i = 0; i < g.size(); ++i) {
            const double s_arc = s1[i] / m[i];
            const double s_arcarc = (s2[i] - s1[i] * mp[i] / m[i]) / (m[i] * m[i]);
            const double tau = s_arcarc + s[i] - 0.5 * f.qdata.q_eee[i] * s_arc;
            const double tau_ref = rad.r[i](0, 0) / f.a_gamma[i](0, 0);
            gap = std::max(gap, std::abs(tau - tau_ref) / tau_ref);
        }
        return gap;
    }
}

}  // namespace wulff
