// Command-line front end: wulff | measure | evolve | verify | export.
// Exit code 0 only when every requested check passes.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wulff/flow.hpp"
#include "wulff/measures.hpp"
#include "wulff/serialize.hpp"
#include "wulff/toml_lite.hpp"
#include "wulff/verify.hpp"

using namespace wulff;
using nlohmann::json;

namespace {

struct GridHolder {
    std::unique_ptr<SphereGrid<1>> g1;
    std::unique_ptr<SphereGrid<2>> g2;
};

GammaSpec load_gamma(const std::string& path) { return parse_gamma_spec(read_json_file(path)); }

void make_grid(const GammaSpec& spec, GridHolder& gh) {
    if (spec.n == 1)
        gh.g1 = std::make_unique<SphereGrid<1>>(spec.grid_size ? spec.grid_size : 512);
    else
        gh.g2 = std::make_unique<SphereGrid<2>>(spec.grid_nlat ? spec.grid_nlat : 96,
                                                spec.grid_nlon ? spec.grid_nlon : 192);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

// initial-body specifiers: a json file, "wulff:rho", "ellipse:a,b", or
// "random:seed[,modes[,margin]]"
template <int N>
SupportBody<N> resolve_initial(const std::string& spec, const SphereGrid<N>& grid,
                               const AnisotropyField<N>& f) {
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        const std::string args = spec.substr(colon + 1);
        if (kind == "wulff") return make_wulff_body(f, std::stod(args));
        if (kind == "ellipse") return make_ellipse_body(grid, parse_double_list(args));
        if (kind == "random") {
            auto v = parse_double_list(args);
            RandomBodySpec rs;
            rs.n = N;
            rs.seed = static_cast<std::uint64_t>(v.at(0));
            if (v.size() > 1) rs.modes = static_cast<int>(v[1]);
            if (v.size() > 2) rs.margin = v[2];
            return random_convex_body(rs, grid);
        }
        throw ParseError("unknown initial-body kind '" + kind + "'");
    }
    return support_body_from_json<N>(read_json_file(spec), grid);
}

// ---------------------------------------------------------------------------

int cmd_wulff(const std::string& gamma_path, const std::string& out,
              const std::string& points, const std::string& emit_body, double rho,
              bool with_q) {
    GammaSpec spec = load_gamma(gamma_path);
    GridHolder gh;
    make_grid(spec, gh);
    json summary;
    summary["n"] = spec.n;

    auto fill = [&](auto& f, auto& grid) {
        auto s = wulff_summary(f);
        summary["vol"] = s.vol;
        summary["area_gamma"] = s.area_gamma;
        summary["min_a_eig"] = f.a_min_eig.minCoeff();
        summary["gamma_min"] = f.gamma.minCoeff();
        summary["gamma_max"] = f.gamma.maxCoeff();
        summary["q_available"] = f.q_available;
        if (!points.empty()) {
            std::ostringstream csv;
            csv << "x,y" << (spec.n == 2 ? ",z" : "") << "\n";
            for (const auto& p : s.boundary_points) {
                for (int d = 0; d < p.size(); ++d) csv << (d ? "," : "") << format_g17(p[d]);
                csv << "\n";
            }
            write_text_file(points, csv.str());
        }
        if (!emit_body.empty())
            write_text_file(emit_body,
                            support_body_to_json(make_wulff_body(f, rho)).dump(2) + "\n");
        (void)grid;
    };
    if (spec.n == 1) {
        auto f = build_anisotropy(spec, *gh.g1, with_q);
        fill(f, *gh.g1);
    } else {
        if (with_q) throw UnsupportedError("--with-q is an n = 1 feature");
        auto f = build_anisotropy(spec, *gh.g2);
        fill(f, *gh.g2);
    }
    const std::string text = summary.dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
    return 0;
}

// ---------------------------------------------------------------------------

template <int N>
json measure_smooth(const SupportBody<N>& body, const AnisotropyField<N>& f) {
    json rep;
    auto mv = mixed_volumes(body, f);
    rep["V"] = mv.V;
    std::vector<double> iso;
    for (int l = 1; l <= N; ++l) iso.push_back(iso_ratio(mv, l));
    rep["I"] = iso;
    rep["hk_slack"] = heintze_karcher_slack(body, f);
    double af_min = std::numeric_limits<double>::infinity();
    for (const auto& s : af_slacks(mv)) af_min = std::min(af_min, s.slack);
    rep["af_min_slack"] = af_min;
    std::vector<double> mres;
    for (int r = 1; r <= N; ++r) mres.push_back(minkowski_residual(body, f, r));
    rep["minkowski_residuals"] = mres;
    return rep;
}

int cmd_measure(const std::string& gamma_path, const std::string& body_path, bool local,
                const std::string& region_text, const std::string& eps_text, long samples,
                std::uint64_t seed, int threads, const std::string& out) {
    GammaSpec spec = load_gamma(gamma_path);
    GridHolder gh;
    make_grid(spec, gh);
    json body_json = read_json_file(body_path);
    json rep;

    if (local || body_json.contains("vertices")) {
        const int dim = body_json.value("dim", 2);
        if (dim != spec.n + 1) throw ParseError("measure: polytope dim must be n+1");
        json region_json =
            region_text.empty() ? json{{"kind", "all"}} : json::parse(region_text);
        if (spec.n == 1) {
            auto f = build_anisotropy(spec, *gh.g1);
            auto poly = polytope_from_json<2>(body_json);
            auto region = parse_region<2>(region_json);
            std::vector<double> eps =
                eps_text.empty() ? default_eps_grid(poly) : parse_double_list(eps_text);
            auto fit = steiner_fit_local(poly, f, region, eps, samples, seed, threads);
            rep["eps"] = fit.eps;
            rep["volumes"] = fit.volumes;
            rep["std_errors"] = fit.std_errors;
            std::vector<double> phi(fit.phi.data(), fit.phi.data() + fit.phi.size());
            std::vector<double> se(fit.phi_se.data(), fit.phi_se.data() + fit.phi_se.size());
            rep["phi"] = phi;
            rep["phi_std_errors"] = se;
            rep["residual"] = fit.residual;
            rep["condition"] = fit.condition;
        } else {
            auto f = build_anisotropy(spec, *gh.g2);
            auto poly = polytope_from_json<3>(body_json);
            auto region = parse_region<3>(region_json);
            if (eps_text.empty()) throw ParseError("measure --local (3d): pass --eps-grid");
            auto fit = steiner_fit_local(poly, f, region, parse_double_list(eps_text), samples,
                                         seed, threads);
            std::vector<double> phi(fit.phi.data(), fit.phi.data() + fit.phi.size());
            rep["phi"] = phi;
            rep["residual"] = fit.residual;
        }
    } else {
        if (spec.n == 1) {
            auto f = build_anisotropy(spec, *gh.g1);
            rep = measure_smooth(support_body_from_json<1>(body_json, *gh.g1), f);
        } else {
            auto f = build_anisotropy(spec, *gh.g2);
            rep = measure_smooth(support_body_from_json<2>(body_json, *gh.g2), f);
        }
    }
    const std::string text = rep.dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
    return 0;
}

// ---------------------------------------------------------------------------

template <int N>
int run_evolve(const GammaSpec& spec, const SphereGrid<N>& grid, const std::string& initial,
               FlowConfig cfg, const std::string& prefix) {
    auto f = build_anisotropy(spec, grid);
    auto body = resolve_initial<N>(initial, grid, f);

    int snap = 0;
    RecordCallback<N> on_record = [&](const FlowState<N>& st, const MonitorRecord&) {
        char name[32];
        std::snprintf(name, sizeof(name), "_%03d.json", snap++);
        write_text_file(prefix + name, support_body_to_json(st.body).dump() + "\n");
    };
    auto run = evolve<N>(body, cfg, f, on_record);
    write_text_file(prefix + ".csv", monitors_to_csv(run.records));

    auto rep = monitor_checks(run, f, cfg);
    json out;
    out["t_final"] = run.final_state.t;
    out["steps"] = run.stats.steps;
    out["converged"] = run.converged;
    out["rbar"] = run.rbar;
    out["dhaus_final"] = run.records.back().dhaus;
    out["iso_final"] = run.records.back().I;
    out["vol_drift"] = run.stats.vol_drift;
    out["max_step_V_increase"] = run.stats.max_step_V_increase;
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"status", c.pass ? "pass" : "fail"},
                          {"observed", c.observed},
                          {"bound", c.bound}});
    out["monitor_checks"] = checks;
    try {
        auto fit = rate_fit(run.records);
        out["rate_lambda"] = fit.lambda;
        out["rate_r2"] = fit.r_squared;
    } catch (const InsufficientDataError&) {
        out["rate_lambda"] = nullptr;
    }
    std::cout << out.dump(2) << "\n";
    return rep.all_pass ? 0 : 1;
}

int cmd_evolve(CLI::App* cmd, std::string gamma_path, std::string initial, int k, double alpha,
               double tol, double tmax, bool renorm, std::string prefix, int stride,
               double safety, const std::string& config_path) {
    // precedence: CLI flag > config file > default
    if (!config_path.empty()) {
        auto t = parse_toml_file(config_path);
        auto want = [&](const char* flag, const char* key) {
            return cmd->count(flag) == 0 && t.count(key) > 0;
        };
        if (want("--gamma", "gamma")) gamma_path = t.at("gamma").as_string();
        if (want("--initial", "initial")) initial = t.at("initial").as_string();
        if (want("--k", "k")) k = static_cast<int>(t.at("k").as_number());
        if (want("--alpha", "alpha")) alpha = t.at("alpha").as_number();
        if (want("--tol", "tol")) tol = t.at("tol").as_number();
        if (want("--tmax", "tmax")) tmax = t.at("tmax").as_number();
        if (want("--renormalize", "renormalize")) renorm = t.at("renormalize").as_bool();
        if (want("--out-prefix", "out_prefix")) prefix = t.at("out_prefix").as_string();
        if (want("--stride", "stride")) stride = static_cast<int>(t.at("stride").as_number());
        if (want("--safety", "safety")) safety = t.at("safety").as_number();
    }
    if (gamma_path.empty() || initial.empty())
        throw ParseError("evolve: --gamma and --initial are required (flag or config)");

    GammaSpec spec = load_gamma(gamma_path);
    GridHolder gh;
    make_grid(spec, gh);
    FlowConfig cfg;
    cfg.n = spec.n;
    cfg.k = k;
    cfg.alpha = alpha;
    cfg.stop_tol = tol;
    cfg.t_max = tmax;
    cfg.renormalize = renorm;
    cfg.output_stride = stride;
    cfg.safety = safety;
    if (spec.n == 1) return run_evolve<1>(spec, *gh.g1, initial, cfg, prefix);
    return run_evolve<2>(spec, *gh.g2, initial, cfg, prefix);
}

// ---------------------------------------------------------------------------

int cmd_verify(std::uint64_t seed, int count, std::vector<std::string> gamma_paths,
               bool as_json, bool timing, long samples, int threads) {
    std::vector<GammaSpec> gs;
    if (gamma_paths.empty()) {
        gs.push_back(GammaSpec::constant(1, 1.0));
        gs.push_back(GammaSpec::trig1(1.0, {{3, 0.05, 0.0}}));
    } else {
        for (const auto& p : gamma_paths) gs.push_back(load_gamma(p));
    }
    VerifyOptions opt;
    opt.mc_samples = samples;
    opt.workers = threads;
    auto rep = verify_suite(seed, count, gs, opt);
    if (as_json) {
        std::cout << report_to_json(rep, timing).dump(2) << "\n";
    } else {
        for (const auto& c : rep.checks)
            std::printf("%-42s %s  worst=%.3e tol=%.1e\n", c.name.c_str(),
                        c.pass ? "pass" : "FAIL", c.worst, c.tol);
        std::printf("%s (%zu checks)\n", rep.all_pass ? "ALL PASS" : "FAILURES PRESENT",
                    rep.checks.size());
    }
    return rep.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_export(const std::string& prefix) {
    auto records = monitors_from_csv(prefix + ".csv");
    const char* names[] = {"vol",  "area_gamma", "V",    "I",          "phi",
                           "Ekmin", "Ekmax",     "kmin", "kmax",       "dhaus",
                           "grad_s_max", "dt"};
    auto col = [&](const MonitorRecord& r, int c) -> double {
        const double cols[] = {r.vol,  r.area_gamma, r.V,    r.I,          r.phi,
                               r.Ekmin, r.Ekmax,     r.kmin, r.kmax,       r.dhaus,
                               r.grad_s_max, r.dt};
        return cols[c];
    };
    for (int c = 0; c < 12; ++c) {
        std::ostringstream csv;
        csv << "t," << names[c] << "\n";
        for (const auto& r : records)
            csv << format_g17(r.t) << "," << format_g17(col(r, c)) << "\n";
        write_text_file(prefix + "_" + names[c] + ".csv", csv.str());
    }
    std::ostringstream logi;
    logi << "t,log_I_minus_1\n";
    long usable = 0;
    for (const auto& r : records)
        if (r.I - 1.0 > 1e-12) {
            logi << format_g17(r.t) << "," << format_g17(std::log(r.I - 1.0)) << "\n";
            ++usable;
        }
    write_text_file(prefix + "_logI.csv", logi.str());

    json out;
    out["rows"] = records.size();
    out["monitors"] = 12;
    out["log_series_rows"] = usable;
    out["stationary_flagged"] = (usable == 0);
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic convex geometry workbench"};
    app.require_subcommand(1);

    // wulff
    std::string w_gamma, w_out, w_points, w_emit;
    double w_rho = 1.0;
    bool w_q = false;
    auto* wulff_cmd = app.add_subcommand("wulff", "build the Wulff shape and report it");
    wulff_cmd->add_option("--gamma", w_gamma, "gamma spec json")->required();
    wulff_cmd->add_option("--out", w_out, "write the summary json here");
    wulff_cmd->add_option("--points", w_points, "write boundary point samples (csv)");
    wulff_cmd->add_option("--emit-wulff-body", w_emit, "write rho*W as a support-body json");
    wulff_cmd->add_option("--rho", w_rho, "scale for --emit-wulff-body");
    wulff_cmd->add_flag("--with-q", w_q, "materialize the Q tensor data (n=1)");

    // measure
    std::string m_gamma, m_body, m_region, m_eps, m_out;
    bool m_local = false;
    long m_samples = 1000000;
    std::uint64_t m_seed = 1;
    int m_threads = 0;
    auto* measure_cmd = app.add_subcommand("measure", "mixed volumes / curvature measures");
    measure_cmd->add_option("--gamma", m_gamma, "gamma spec json")->required();
    measure_cmd->add_option("--body", m_body, "support-body or polytope json")->required();
    measure_cmd->add_flag("--local", m_local, "local Steiner fit (polytope body)");
    measure_cmd->add_option("--region", m_region, "region json (local fits)");
    measure_cmd->add_option("--eps-grid", m_eps, "comma-separated eps values");
    measure_cmd->add_option("--samples", m_samples, "Monte Carlo samples per eps");
    measure_cmd->add_option("--seed", m_seed, "Monte Carlo seed");
    measure_cmd->add_option("--threads", m_threads, "worker cap (0 = WULFFFLOW_THREADS)");
    measure_cmd->add_option("--out", m_out, "write the report here");

    // evolve
    std::string e_gamma, e_initial, e_prefix = "run", e_config;
    int e_k = 1, e_stride = 50;
    double e_alpha = 1.0, e_tol = 1e-3, e_tmax = 50.0, e_safety = 0.2;
    bool e_renorm = false;
    auto* evolve_cmd = app.add_subcommand("evolve", "volume-preserving anisotropic flow");
    evolve_cmd->add_option("--gamma", e_gamma, "gamma spec json");
    evolve_cmd->add_option("--initial", e_initial,
                           "body json, wulff:R, ellipse:a,b or random:seed[,modes[,margin]]");
    evolve_cmd->add_option("--k", e_k, "curvature order (1..n)");
    evolve_cmd->add_option("--alpha", e_alpha, "speed power");
    evolve_cmd->add_option("--tol", e_tol, "stopping W-Hausdorff distance");
    evolve_cmd->add_option("--tmax", e_tmax, "time budget");
    evolve_cmd->add_flag("--renormalize", e_renorm, "re-dilate to the initial volume each step");
    evolve_cmd->add_option("--out-prefix", e_prefix, "output prefix");
    evolve_cmd->add_option("--stride", e_stride, "steps between monitor records");
    evolve_cmd->add_option("--safety", e_safety, "time-step safety factor");
    evolve_cmd->add_option("--config", e_config, "TOML config (CLI flags take precedence)");

    // verify
    std::uint64_t v_seed = 1;
    int v_count = 100, v_threads = 0;
    long v_samples = 100000;
    std::vector<std::string> v_gammas;
    bool v_json = false, v_timing = false;
    auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
    verify_cmd->add_option("--seed", v_seed, "random-body seed");
    verify_cmd->add_option("--count", v_count, "number of random bodies");
    verify_cmd->add_option("--gamma", v_gammas, "gamma spec json (repeatable)");
    verify_cmd->add_flag("--json", v_json, "emit the machine-readable report");
    verify_cmd->add_flag("--timing", v_timing, "include per-check runtimes in the json");
    verify_cmd->add_option("--samples", v_samples, "Monte Carlo samples for measure checks");
    verify_cmd->add_option("--threads", v_threads, "worker cap (0 = WULFFFLOW_THREADS)");

    // export
    std::string x_prefix;
    auto* export_cmd = app.add_subcommand("export", "tidy per-monitor csv series from a run");
    export_cmd->add_option("--prefix", x_prefix, "run prefix (reads <prefix>.csv)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (wulff_cmd->parsed())
            return cmd_wulff(w_gamma, w_out, w_points, w_emit, w_rho, w_q);
        if (measure_cmd->parsed())
            return cmd_measure(m_gamma, m_body, m_local, m_region, m_eps, m_samples, m_seed,
                               m_threads, m_out);
        if (evolve_cmd->parsed())
            return cmd_evolve(evolve_cmd, e_gamma, e_initial, e_k, e_alpha, e_tol, e_tmax,
                              e_renorm, e_prefix, e_stride, e_safety, e_config);
        if (verify_cmd->parsed())
            return cmd_verify(v_seed, v_count, v_gammas, v_json, v_timing, v_samples,
                              v_threads);
        if (export_cmd->parsed()) return cmd_export(x_prefix);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
