#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "wulff/body.hpp"
#include "wulff/curvature.hpp"
#include "wulff/errors.hpp"

namespace wulff {

struct FlowConfig {
    int n = 1;
    int k = 1;
    double alpha = 1.0;
    double safety = 0.2;          // displacement fraction of the smallest radius
    double margin = 1e-8;         // convexity margin for admissible states
    double stop_tol = 1e-3;       // W-Hausdorff distance to rbar W
    double t_max = 50.0;
    long max_steps = 1000000;
    bool renormalize = false;
    int output_stride = 50;
    double dt_growth = 1.3;

    void validate() const {
        if (k < 1 || k > n) throw Error("FlowConfig: need 1 <= k <= n");
        if (!(alpha > 0)) throw Error("FlowConfig: alpha must be positive");
        if (!(safety > 0 && safety <= 1)) throw Error("FlowConfig: safety must be in (0,1]");
    }
};

/// One time sample of every tracked quantity (column order of the CSV).
struct MonitorRecord {
    double t = 0;
    double vol = 0;
    double area_gamma = 0;
    double V = 0;    // V_{n+1-k}
    double I = 0;    // I_{n+1-k}
    double phi = 0;
    double Ekmin = 0, Ekmax = 0;
    double kmin = 0, kmax = 0;
    double dhaus = 0;  // translation-minimized distance to rbar W
    double grad_s_max = 0;
    double dt = 0;
};

template <int N>
struct FlowState {
    double t = 0;
    SupportBody<N> body;
    RadiiField<N> radii;
    CurvatureField<N> curv;
};

namespace detail {

template <int N>
struct RhsEval {
    ArrayXd speed;  // E_k^{alpha/k}
    ArrayXd rhs;    // gamma (phi - speed)
    double phi = 0;
    double area_gamma = 0;
    double vol = 0;
    double V = 0;  // V_{n+1-k}
    double V0 = 0;
};

inline ArrayXd elementwise_power(const ArrayXd& x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    if (p == 0.5) return x.sqrt();
    if (p == 1.5) return x * x.sqrt();
    return x.pow(p);
}

template <int N>
RhsEval<N> eval_rhs(const SupportBody<N>& body, const AnisotropyField<N>& f,
                    const RadiiField<N>& rad, const CurvatureField<N>& curv, int k,
                    double alpha) {
    RhsEval<N> ev;
    ev.speed = elementwise_power(curv.E[k], alpha / k);
    const ArrayXd dmu = f.gamma * rad.det;
    ev.area_gamma = body.grid->quad(dmu);
    ev.phi = body.grid->quad(ev.speed * dmu) / ev.area_gamma;
    ev.rhs = f.gamma * (ev.phi - ev.speed);
    ev.vol = body.grid->quad(body.h * rad.det) / (N + 1);
    ev.V = body.grid->quad(curv.E[k - 1] * dmu);
    ev.V0 = body.grid->quad(curv.E[N] * dmu);
    return ev;
}

// spectral / stencil bound for the operator (Hess + Id) applied to h
template <int N>
double operator_bound(const SphereGrid<N>& g);

template <>
inline double operator_bound<1>(const SphereGrid<1>& g) {
    const double m = g.size() / 2;
    return m * m + 1.0;
}

template <>
inline double operator_bound<2>(const SphereGrid<2>& g) {
    const double dth = M_PI / g.nlat();
    const double dph = 2.0 * M_PI / g.nlon();
    const double smin = std::sin(0.5 * dth);
    return 1.2 * (16.0 / 3.0) * (1.0 / (dth * dth) + 1.0 / (dph * dph * smin * smin)) + 1.0;
}

// parabolic stability cap for the explicit midpoint scheme: the linearized
// speed has diffusion coefficient <= gamma alpha E_k^{a/k} kappa_max /
// lambda_min(A); the scheme's real-axis stability interval is 2.
template <int N>
double stability_cap(const AnisotropyField<N>& f, const CurvatureField<N>& c,
                     const RhsEval<N>& ev, double alpha) {
    double dmax = 0;
    for (int i = 0; i < f.size(); ++i) {
        const double kmax = (N == 1) ? c.kappa[i][0] : c.kappa[i][N - 1];
        const double d = f.gamma[i] * alpha * ev.speed[i] * kmax / f.a_min_eig[i];
        dmax = std::max(dmax, d);
    }
    return 1.8 / (dmax * operator_bound<N>(*f.grid));
}

}  // namespace detail

/// Global term phi(t) = (int E_k^{alpha/k} dmu_gamma) / |M|_gamma.
template <int N>
double phi_global(const SupportBody<N>& body, const AnisotropyField<N>& f, int k, double alpha) {
    RadiiField<N> rad = radii_matrix(body);
    CurvatureField<N> curv = aniso_curvatures(body, f, rad);
    return detail::eval_rhs<N>(body, f, rad, curv, k, alpha).phi;
}

/// Right-hand side dh/dt = gamma(z) (phi(t) - E_k^{alpha/k}), the sphere
/// parametrization of the volume-preserving anisotropic curvature flow.
template <int N>
ArrayXd flow_rhs(const SupportBody<N>& body, const AnisotropyField<N>& f, int k, double alpha) {
    RadiiField<N> rad = radii_matrix(body);
    CurvatureField<N> curv = aniso_curvatures(body, f, rad);
    return detail::eval_rhs<N>(body, f, rad, curv, k, alpha).rhs;
}

template <int N>
FlowState<N> make_flow_state(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    FlowState<N> st;
    st.body = body;
    st.radii = radii_matrix(body);
    st.curv = aniso_curvatures(body, f, st.radii);
    return st;
}

struct StepInfo {
    double dt = 0;
    int halvings = 0;
};

/// One adaptive explicit midpoint step. dt is capped by the displacement
/// guard max|dt rhs| <= safety * min radii eigenvalue, by the parabolic
/// stability bound of the scheme, and by dt_hint; it halves and retries
/// when an intermediate or stepped body fails check_convex at margin/2
/// (up to 40 halvings, then StepCollapseError).
template <int N>
StepInfo step(FlowState<N>& st, const FlowConfig& cfg, const AnisotropyField<N>& f,
              double dt_hint = 0.0) {
    cfg.validate();
    auto ev = detail::eval_rhs<N>(st.body, f, st.radii, st.curv, cfg.k, cfg.alpha);
    const double rmin = st.radii.min_eig.minCoeff();
    const double rmax_rhs = ev.rhs.abs().maxCoeff();
    double dt = detail::stability_cap<N>(f, st.curv, ev, cfg.alpha);
    if (rmax_rhs > 0) dt = std::min(dt, cfg.safety * rmin / rmax_rhs);
    if (dt_hint > 0) dt = std::min(dt, dt_hint);

    StepInfo info;
    for (int halving = 0; halving <= 40; ++halving) {
        info.halvings = halving;
        SupportBody<N> mid = st.body;
        mid.h += 0.5 * dt * ev.rhs;
        RadiiField<N> rad_mid = radii_matrix(mid);
        if (!check_convex(rad_mid, 0.5 * cfg.margin).ok) {
            dt *= 0.5;
            continue;
        }
        CurvatureField<N> curv_mid = aniso_curvatures(mid, f, rad_mid);
        auto ev_mid = detail::eval_rhs<N>(mid, f, rad_mid, curv_mid, cfg.k, cfg.alpha);

        SupportBody<N> next = st.body;
        next.h += dt * ev_mid.rhs;
        RadiiField<N> rad_next = radii_matrix(next);
        if (!check_convex(rad_next, 0.5 * cfg.margin).ok) {
            dt *= 0.5;
            continue;
        }
        st.body = std::move(next);
        st.radii = std::move(rad_next);
        st.curv = aniso_curvatures(st.body, f, st.radii);
        st.t += dt;
        info.dt = dt;
        return info;
    }
    throw StepCollapseError("step: convexity lost after 40 dt halvings at t = " +
                            std::to_string(st.t));
}

struct StepStats {
    long steps = 0;
    long halvings = 0;
    double max_step_V_increase = 0;       // criterion: <= 1e-8
    double max_step_I_increase = 0;
    double min_iso_ratio = std::numeric_limits<double>::infinity();
    double max_stationarity = 0;          // |quad(rhs det r)| at accepted states
    double vol_drift = 0;                 // |vol(t) - vol(0)| / vol(0), end of run
    double max_step_vol_change = 0;       // per-step relative volume change
};

template <int N>
struct EvolveResult {
    FlowState<N> final_state;
    std::vector<MonitorRecord> records;
    StepStats stats;
    double rbar = 0;
    bool converged = false;
};

namespace detail {

template <int N>
MonitorRecord make_record(const FlowState<N>& st, const AnisotropyField<N>& f,
                          const FlowConfig& cfg, const RhsEval<N>& ev, double rbar,
                          Eigen::VectorXd& warm_center, double dt) {
    MonitorRecord r;
    r.t = st.t;
    r.vol = ev.vol;
    r.area_gamma = ev.area_gamma;
    r.V = ev.V;
    const int n = N;
    r.I = std::exp((n + 1) * std::log(ev.V) - (n + 1 - cfg.k) * std::log((n + 1) * ev.vol) -
                   cfg.k * std::log(ev.V0));
    r.phi = ev.phi;
    r.Ekmin = st.curv.E[cfg.k].minCoeff();
    r.Ekmax = st.curv.E[cfg.k].maxCoeff();
    r.kmin = st.curv.kappa_min;
    r.kmax = st.curv.kappa_max;
    r.dhaus = distance_to_scaled_wulff(st.body, f, rbar, &warm_center, &warm_center);
    const ArrayXd s = st.body.h / f.gamma;
    auto gs = f.grid->grad(s);
    double gmax = 0;
    for (const auto& v : gs) gmax = std::max(gmax, v.norm());
    r.grad_s_max = gmax;
    r.dt = dt;
    return r;
}

}  // namespace detail

template <int N>
using RecordCallback = std::function<void(const FlowState<N>&, const MonitorRecord&)>;

/// Run the flow until the translation-minimized W-Hausdorff distance to
/// rbar W falls below stop_tol or the budget is exhausted; rbar is fixed by
/// volume conservation, Vol(K_0) = rbar^{n+1} Vol(W). on_record fires at
/// every emitted monitor record (used for snapshot output).
template <int N>
EvolveResult<N> evolve(const SupportBody<N>& initial, const FlowConfig& cfg,
                       const AnisotropyField<N>& f,
                       const RecordCallback<N>& on_record = {}) {
    cfg.validate();
    EvolveResult<N> out;
    FlowState<N> st = make_flow_state(initial, f);
    auto ev = detail::eval_rhs<N>(st.body, f, st.radii, st.curv, cfg.k, cfg.alpha);
    const double vol0 = ev.vol;
    const double volW = volume(make_wulff_body(f));
    out.rbar = std::pow(vol0 / volW, 1.0 / (N + 1));

    Eigen::VectorXd warm = inner_outer_radius(st.body, f).inner_center;
    out.records.push_back(detail::make_record<N>(st, f, cfg, ev, out.rbar, warm, 0.0));
    if (on_record) on_record(st, out.records.back());
    out.stats.min_iso_ratio = out.records.back().I;
    if (out.records.back().dhaus <= cfg.stop_tol) {
        out.converged = true;
        out.final_state = std::move(st);
        return out;
    }

    double dt_prev = 0.0;
    long since_emit = 0;
    double prev_iso = out.records.back().I;
    while (out.stats.steps < cfg.max_steps && st.t < cfg.t_max) {
        const double before_V = ev.V;
        const double before_vol = ev.vol;
        const double dt_hint = (dt_prev > 0) ? dt_prev * cfg.dt_growth : 0.0;
        StepInfo si = step(st, cfg, f, dt_hint);
        dt_prev = si.dt;
        out.stats.steps += 1;
        out.stats.halvings += si.halvings;

        if (cfg.renormalize) {
            // dilate about the inner-radius center; the center moves slowly,
            // so the Nelder-Mead search is refreshed at the output stride
            // (the per-step dilation factor is 1 + O(dt^3), center-insensitive)
            if (since_emit == 0) {
                warm = nelder_mead(
                           [&](const Eigen::VectorXd& p) {
                               double best = std::numeric_limits<double>::infinity();
                               for (int i = 0; i < st.body.size(); ++i) {
                                   double dot = 0;
                                   for (int d = 0; d <= N; ++d)
                                       dot += p[d] * st.body.grid->node(i)[d];
                                   best = std::min(best, (st.body.h[i] - dot) / f.gamma[i]);
                               }
                               return -best;
                           },
                           warm, 1e-3, 1e-9)
                           .x;
            }
            const double vol_now = st.body.grid->quad(st.body.h * st.radii.det) / (N + 1);
            const double rho = std::pow(vol0 / vol_now, 1.0 / (N + 1));
            for (int i = 0; i < st.body.size(); ++i) {
                double dot = 0;
                for (int d = 0; d <= N; ++d) dot += warm[d] * st.body.grid->node(i)[d];
                st.body.h[i] = rho * st.body.h[i] + (1.0 - rho) * dot;
            }
            // dilation scales curvature data exactly (the linear term has
            // zero radii contribution), no re-differentiation needed
            for (int i = 0; i < st.body.size(); ++i) {
                st.radii.r[i] *= rho;
                st.curv.kappa[i] /= rho;
                st.curv.lambda[i] /= rho;
            }
            st.radii.min_eig *= rho;
            st.radii.max_eig *= rho;
            st.radii.det *= std::pow(rho, N);
            st.curv.det_r = st.radii.det;
            for (int j = 1; j <= N; ++j) st.curv.E[j] *= std::pow(rho, -j);
            st.curv.kappa_min /= rho;
            st.curv.kappa_max /= rho;
        }

        ev = detail::eval_rhs<N>(st.body, f, st.radii, st.curv, cfg.k, cfg.alpha);
        out.stats.max_step_V_increase =
            std::max(out.stats.max_step_V_increase, ev.V - before_V);
        out.stats.max_step_vol_change = std::max(
            out.stats.max_step_vol_change, std::abs(ev.vol - before_vol) / vol0);
        out.stats.max_stationarity = std::max(
            out.stats.max_stationarity,
            std::abs(st.body.grid->quad(ev.rhs * st.radii.det)) / ((N + 1) * vol0));
        const int n = N;
        const double iso = std::exp((n + 1) * std::log(ev.V) -
                                    (n + 1 - cfg.k) * std::log((n + 1) * ev.vol) -
                                    cfg.k * std::log(ev.V0));
        out.stats.min_iso_ratio = std::min(out.stats.min_iso_ratio, iso);
        out.stats.max_step_I_increase = std::max(out.stats.max_step_I_increase, iso - prev_iso);
        prev_iso = iso;

        if (++since_emit >= cfg.output_stride) {
            since_emit = 0;
            out.records.push_back(
                detail::make_record<N>(st, f, cfg, ev, out.rbar, warm, si.dt));
            if (on_record) on_record(st, out.records.back());
            if (out.records.back().dhaus <= cfg.stop_tol) {
                out.converged = true;
                break;
            }
        }
    }
    if (since_emit != 0) {
        out.records.push_back(detail::make_record<N>(st, f, cfg, ev, out.rbar, warm, dt_prev));
        if (on_record) on_record(st, out.records.back());
        if (out.records.back().dhaus <= cfg.stop_tol) out.converged = true;
    }
    out.stats.vol_drift = std::abs(ev.vol - vol0) / vol0;
    out.final_state = std::move(st);
    return out;
}

struct RateFit {
    double lambda = 0;  // decay rate of log(I - 1)
    double r_squared = 0;
    int points = 0;
};

/// Linear regression of log(I_{n+1-k} - 1) against t over the final half of
/// the run (records with I - 1 <= 1e-12 are excluded; fewer than 20 usable
/// records raises InsufficientDataError).
inline RateFit rate_fit(const std::vector<MonitorRecord>& records) {
    std::vector<std::pair<double, double>> usable;
    for (const auto& r : records)
        if (r.I - 1.0 > 1e-12) usable.emplace_back(r.t, std::log(r.I - 1.0));
    if (usable.size() < 20)
        throw InsufficientDataError("rate_fit: need at least 20 records with I - 1 > 1e-12, have " +
                                    std::to_string(usable.size()));
    const double t_mid = 0.5 * (records.front().t + records.back().t);
    std::vector<std::pair<double, double>> window;
    for (const auto& p : usable)
        if (p.first >= t_mid) window.push_back(p);
    if (window.size() < 3)
        throw InsufficientDataError("rate_fit: too few usable records in the final half");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : window) {
        sx += p.first;
        sy += p.second;
        sxx += p.first * p.first;
        sxy += p.first * p.second;
    }
    const double m = static_cast<double>(window.size());
    const double denom = m * sxx - sx * sx;
    RateFit fit;
    fit.points = static_cast<int>(window.size());
    fit.lambda = (m * sxy - sx * sy) / denom;
    const double b = (sy - fit.lambda * sx) / m;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / m;
    for (const auto& p : window) {
        const double e = p.second - (fit.lambda * p.first + b);
        ss_res += e * e;
        ss_tot += (p.second - ybar) * (p.second - ybar);
    }
    fit.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

struct MonitorCheck {
    std::string name;
    bool pass = false;
    double observed = 0;
    double bound = 0;
};

struct MonitorReport {
    std::vector<MonitorCheck> checks;
    bool all_pass = true;
    void add(const std::string& name, bool pass, double observed, double bound) {
        checks.push_back({name, pass, observed, bound});
        all_pass = all_pass && pass;
    }
};

/// Verifies the tracked series against the claimed a priori behavior:
/// per-step monotonicity of V_{n+1-k}, volume drift, positive radius bounds
/// (through the two-sided area/volume inequality), the speed bound
/// max E_k <= C (1 + t^{-alpha/(1+alpha)}) with C fitted on t >= 0.1, a
/// positive lower bound on E_k over the final half, the liminf of phi for
/// alpha >= k, and no late growth of max |grad s|.
template <int N>
MonitorReport monitor_checks(const EvolveResult<N>& run, const AnisotropyField<N>& f,
                             const FlowConfig& cfg) {
    MonitorReport rep;
    const auto& rs = run.records;
    rep.add("V_monotone_per_step", run.stats.max_step_V_increase <= 1e-8,
            run.stats.max_step_V_increase, 1e-8);
    const double drift_bound = cfg.renormalize ? 1e-12 : 1e-3;
    rep.add("vol_drift", run.stats.vol_drift <= drift_bound, run.stats.vol_drift, drift_bound);
    rep.add("iso_ratio_above_one", run.stats.min_iso_ratio >= 1.0 - 1e-8,
            run.stats.min_iso_ratio, 1.0 - 1e-8);

    const double volW = volume(make_wulff_body(f));
    double r_lower = std::numeric_limits<double>::infinity(), r_upper = 0;
    for (const auto& r : rs) {
        r_lower = std::min(r_lower, r.vol / r.area_gamma);
        r_upper = std::max(r_upper, std::pow(r.area_gamma, N) /
                                        (std::pow(N + 1.0, N - 1) * volW *
                                         std::pow(r.vol, N - 1)));
    }
    rep.add("radius_bounds_positive",
            r_lower > 0 && std::isfinite(r_upper) && r_lower <= r_upper, r_lower, r_upper);

    // speed upper bound with fitted constant
    double c_fit = 0;
    const double ex = cfg.alpha / (1.0 + cfg.alpha);
    for (const auto& r : rs)
        if (r.t >= 0.1) c_fit = std::max(c_fit, r.Ekmax / (1.0 + std::pow(r.t, -ex)));
    bool speed_ok = true;
    double speed_worst = 0;
    for (const auto& r : rs) {
        if (r.t <= 0) continue;
        const double bound = c_fit * (1.0 + std::pow(r.t, -ex)) * (1 + 1e-9);
        speed_worst = std::max(speed_worst, r.Ekmax - bound);
        if (r.Ekmax > bound) speed_ok = false;
    }
    rep.add("Ek_upper_bound", speed_ok || rs.size() < 3, speed_worst, 0.0);

    const double t_mid = 0.5 * (rs.front().t + rs.back().t);
    double ek_lo = std::numeric_limits<double>::infinity();
    for (const auto& r : rs)
        if (r.t >= t_mid) ek_lo = std::min(ek_lo, r.Ekmin);
    rep.add("Ek_lower_bound_final_half", ek_lo > 0, ek_lo, 0.0);

    if (cfg.alpha >= cfg.k) {
        const double t_q = rs.front().t + 0.75 * (rs.back().t - rs.front().t);
        double phi_mean = 0;
        int cnt = 0;
        for (const auto& r : rs)
            if (r.t >= t_q) {
                phi_mean += r.phi;
                ++cnt;
            }
        phi_mean /= std::max(1, cnt);
        const double target = 0.95 * std::pow(run.rbar, -cfg.alpha);
        rep.add("phi_liminf", phi_mean >= target, phi_mean, target);
    }

    double g_first = 0, g_all = 0;
    for (const auto& r : rs) {
        if (r.t <= t_mid) g_first = std::max(g_first, r.grad_s_max);
        g_all = std::max(g_all, r.grad_s_max);
    }
    rep.add("grad_s_bounded", g_all <= 1.05 * g_first + 1e-12, g_all, 1.05 * g_first);
    return rep;
}

}  // namespace wulff
