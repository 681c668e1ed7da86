#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "wulff/curvature.hpp"
#include "wulff/flow.hpp"
#include "wulff/measures.hpp"
#include "wulff/random_body.hpp"
#include "wulff/serialize.hpp"
#include "wulff/threads.hpp"

namespace wulff {

struct CheckOutcome {
    std::string name;
    bool pass = false;
    double worst = 0.0;  // signed slack or error, convention: pass iff worst <= tol
    double tol = 0.0;
    double runtime_ms = 0.0;
    nlohmann::json offending;  // serialized body of the worst failure, if any
};

struct VerificationReport {
    std::uint64_t seed = 0;
    int count = 0;
    std::vector<CheckOutcome> checks;
    bool all_pass = true;
};

struct VerifyOptions {
    long mc_samples = 100000;
    int workers = 0;
    bool include_measures = true;
};

inline nlohmann::json report_to_json(const VerificationReport& rep, bool with_timing = false) {
    nlohmann::json j;
    j["seed"] = rep.seed;
    j["count"] = rep.count;
    j["all_pass"] = rep.all_pass;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["status"] = c.pass ? "pass" : "fail";
        e["worst"] = c.worst;
        e["tol"] = c.tol;
        if (with_timing) e["runtime_ms"] = c.runtime_ms;
        if (!c.pass && !c.offending.is_null()) e["offending"] = c.offending;
        checks.push_back(e);
    }
    j["checks"] = checks;
    return j;
}

namespace detail {

class CheckRunner {
public:
    explicit CheckRunner(VerificationReport& rep) : rep_(rep) {}

    template <typename F>
    void run(const std::string& name, double tol, F&& body) {
        CheckOutcome out;
        out.name = name;
        out.tol = tol;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            out.worst = body(out);
            out.pass = out.worst <= tol;
        } catch (const std::exception& e) {
            out.pass = false;
            out.worst = std::numeric_limits<double>::infinity();
            out.offending = nlohmann::json{{"error", e.what()}};
        }
        out.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        rep_.all_pass = rep_.all_pass && out.pass;
        rep_.checks.push_back(std::move(out));
    }

private:
    VerificationReport& rep_;
};

inline std::string gamma_tag(const GammaSpec& s, int index) {
    switch (s.kind) {
        case GammaSpec::Kind::Constant: return "const" + std::to_string(index);
        case GammaSpec::Kind::Trig: return "trig" + std::to_string(index);
        case GammaSpec::Kind::Ellipse: return "ellipse" + std::to_string(index);
        case GammaSpec::Kind::Table: return "table" + std::to_string(index);
    }
    return "g" + std::to_string(index);
}

// worst-over-bodies reduction, deterministic order, optional parallel map
template <typename F>
double map_worst(int count, int workers, std::vector<int>* argworst, F&& per_body) {
    std::vector<double> vals(count, 0.0);
    parallel_chunks(count, workers, [&](int i) { vals[i] = per_body(i); });
    double worst = -std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int i = 0; i < count; ++i)
        if (vals[i] > worst) {
            worst = vals[i];
            arg = i;
        }
    if (argworst) argworst->push_back(arg);
    return worst;
}

}  // namespace detail

/// Runs the body_rep / curvature / measures invariants over `count` seeded
/// random bodies plus the canonical fixtures (W, rho W, ellipse, unit
/// square) for every supplied gamma. Failures are data, not exceptions.
inline VerificationReport verify_suite(std::uint64_t seed, int count,
                                       const std::vector<GammaSpec>& gammas,
                                       const VerifyOptions& opt = {}) {
    VerificationReport rep;
    rep.seed = seed;
    rep.count = count;
    detail::CheckRunner run(rep);
    const int workers = resolve_workers(opt.workers);

    int gi = 0;
    for (const auto& spec : gammas) {
        const std::string tag = detail::gamma_tag(spec, gi++);
        if (spec.n != 1) {
            // reduced subset for n = 2 anisotropies
            SphereGrid<2> grid(spec.grid_nlat ? spec.grid_nlat : 48,
                               spec.grid_nlon ? spec.grid_nlon : 96);
            auto f = build_anisotropy(spec, grid);
            run.run(tag + "/wulff_identity_area", 1e-6, [&](CheckOutcome&) {
                auto s = wulff_summary(f);
                return std::abs(s.area_gamma - 3.0 * s.vol) / s.area_gamma;
            });
            run.run(tag + "/wulff_curvature_one", 1e-6, [&](CheckOutcome&) {
                auto c = aniso_curvatures(make_wulff_body(f), f);
                return std::max(std::abs(c.kappa_min - 1.0), std::abs(c.kappa_max - 1.0));
            });
            run.run(tag + "/af_hk_fixtures", 1e-8, [&](CheckOutcome&) {
                double worst = -std::numeric_limits<double>::infinity();
                for (double rho : {0.5, 1.0, 2.0}) {
                    auto body = make_wulff_body(f, rho);
                    worst = std::max(worst, std::abs(heintze_karcher_slack(body, f)) /
                                                volume(body));
                    for (auto& s : af_slacks(body, f)) worst = std::max(worst, std::abs(s.slack));
                }
                return worst;
            });
            run.run(tag + "/maclaurin_chain", 1e-12, [&](CheckOutcome&) {
                RandomBodySpec rs;
                rs.seed = seed;
                rs.n = 2;
                rs.modes = 8;
                rs.margin = 0.1;
                auto body = random_convex_body(rs, grid);
                auto c = aniso_curvatures(body, f);
                double worst = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < grid.size(); ++i)
                    worst = std::max(worst, c.E[2][i] - c.E[1][i] * c.E[1][i]);
                return worst;
            });
            continue;
        }

        SphereGrid<1> grid(spec.grid_size ? spec.grid_size : 512);
        auto f = build_anisotropy(spec, grid);
        const double volW = volume(make_wulff_body(f));

        auto make_random = [&, seed](int i) {
            RandomBodySpec rs;
            rs.seed = seed + static_cast<std::uint64_t>(i);
            rs.n = 1;
            rs.modes = 6;
            rs.margin = 0.05;
            return random_convex_body(rs, grid);
        };

        run.run(tag + "/gamma0_homogeneity", 1e-10, [&](CheckOutcome&) {
            RandomStream rng(seed ^ 0xabcdef);
            double worst = 0;
            for (int i = 0; i < 40; ++i) {
                const Eigen::Vector2d z(rng.next_sym(), rng.next_sym());
                const double t = 0.1 + 3.0 * rng.next_unit();
                const double g1 = gamma0(f, z);
                worst = std::max(worst, std::abs(gamma0(f, Eigen::Vector2d(t * z)) - t * g1) /
                                            std::max(1e-12, t * g1));
            }
            return worst;
        });

        run.run(tag + "/duality_roundtrip", 1e-6, [&](CheckOutcome&) {
            double worst = 0;
            for (int i = 0; i < grid.size(); ++i)
                worst = std::max(worst, std::abs(gamma0(f, wulff_point(f, i)) - 1.0));
            return worst;
        });

        run.run(tag + "/norm_equivalence", 1e-9, [&](CheckOutcome&) {
            const double C = std::max(f.gamma.maxCoeff(), 1.0 / f.gamma.minCoeff());
            RandomStream rng(seed ^ 0x5e5e5e);
            double worst = 0;
            for (int i = 0; i < 100; ++i) {
                const Eigen::Vector2d x(rng.next_sym(), rng.next_sym());
                const Eigen::Vector2d y(rng.next_sym(), rng.next_sym());
                const double de = (y - x).norm();
                if (de < 1e-9) continue;
                const double dw = d_W(f, x, y);
                worst = std::max(worst, dw / de - C);
                worst = std::max(worst, 1.0 / C - dw / de);
            }
            return worst;
        });

        run.run(tag + "/wulff_identity_area", 1e-8, [&](CheckOutcome&) {
            auto s = wulff_summary(f);
            return std::abs(s.area_gamma - 2.0 * s.vol) / s.area_gamma;
        });

        run.run(tag + "/wulff_curvature_one", 1e-8, [&](CheckOutcome&) {
            auto c = aniso_curvatures(make_wulff_body(f), f);
            return std::max(std::abs(c.kappa_min - 1.0), std::abs(c.kappa_max - 1.0));
        });

        run.run(tag + "/translation_invariance", 1e-10, [&](CheckOutcome&) {
            return detail::map_worst(std::max(1, count / 4), workers, nullptr, [&](int i) {
                auto body = make_random(i);
                RandomStream rng(seed ^ (7777 + i));
                const Eigen::Vector2d v(rng.next_sym(), rng.next_sym());
                auto moved = translate(body, v);
                const double dv = std::abs(volume(moved) - volume(body)) / volume(body);
                const double da =
                    std::abs(aniso_area(moved, f) - aniso_area(body, f)) / aniso_area(body, f);
                auto r0 = radii_matrix(body), r1 = radii_matrix(moved);
                const double dr = (r0.min_eig - r1.min_eig).abs().maxCoeff();
                return std::max({dv, da, dr});
            });
        });

        run.run(tag + "/scaling_laws", 1e-8, [&](CheckOutcome&) {
            return detail::map_worst(std::max(1, count / 4), workers, nullptr, [&](int i) {
                auto body = make_random(i);
                SupportBody<1> sc = body;
                const double rho = 1.7;
                sc.h *= rho;
                const double dv =
                    std::abs(volume(sc) - rho * rho * volume(body)) / (rho * rho * volume(body));
                const double da = std::abs(aniso_area(sc, f) - rho * aniso_area(body, f)) /
                                  (rho * aniso_area(body, f));
                const double di = std::abs(iso_ratio(sc, f, 1) - iso_ratio(body, f, 1));
                return std::max({dv, da, di});
            });
        });

        run.run(tag + "/minkowski_sum_polynomial", 1e-9, [&](CheckOutcome&) {
            return detail::map_worst(std::max(1, count / 10), workers, nullptr, [&](int i) {
                auto body = make_random(i);
                double resid = 0;
                steiner_fit_global(body, f, std::vector<double>{0.05, 0.1, 0.2, 0.35, 0.5},
                                   &resid);
                return resid;
            });
        });

        run.run(tag + "/hausdorff_triangle", 1e-12, [&](CheckOutcome&) {
            double worst = -std::numeric_limits<double>::infinity();
            for (int i = 0; i + 2 < std::max(3, count); i += 3) {
                auto a = make_random(i), b = make_random(i + 1), c = make_random(i + 2);
                worst = std::max(worst, hausdorff_W(a, c, f) - hausdorff_W(a, b, f) -
                                            hausdorff_W(b, c, f));
            }
            return worst;
        });

        run.run(tag + "/cross_pipeline_mixed_volumes", 1e-6, [&](CheckOutcome&) {
            return detail::map_worst(std::max(1, count / 10), workers, nullptr, [&](int i) {
                auto body = make_random(i);
                auto mq = mixed_volumes(body, f);
                auto ms = steiner_fit_global(body, f,
                                             std::vector<double>{0.05, 0.1, 0.2, 0.35, 0.5});
                double worst = 0;
                for (int k = 0; k <= 2; ++k)
                    worst = std::max(worst, std::abs(ms.V[k] - mq.V[k]) / mq.V[k]);
                return worst;
            });
        });

        run.run(tag + "/equality_case_detection", 1e-8, [&](CheckOutcome&) {
            double worst = 0;
            RandomStream rng(seed ^ 0x121212);
            for (double rho : {0.5, 1.0, 2.0}) {
                auto body = translate(make_wulff_body(f, rho),
                                      {rng.next_sym(), rng.next_sym()});
                worst = std::max(worst,
                                 std::abs(heintze_karcher_slack(body, f)) / volume(body));
                for (auto& s : af_slacks(body, f)) worst = std::max(worst, std::abs(s.slack));
            }
            return worst;
        });

        run.run(tag + "/af_nonnegative", 1e-8, [&](CheckOutcome& out) {
            std::vector<int> arg;
            const double worst =
                detail::map_worst(std::max(1, count), workers, &arg, [&](int i) {
                    auto body = make_random(i);
                    double w = -std::numeric_limits<double>::infinity();
                    for (auto& s : af_slacks(body, f)) w = std::max(w, -s.slack);
                    return w;
                });
            if (worst > 1e-8 && !arg.empty())
                out.offending = support_body_to_json(make_random(arg[0]));
            return worst;
        });

        run.run(tag + "/hk_nonnegative", 1e-8, [&](CheckOutcome& out) {
            std::vector<int> arg;
            const double worst =
                detail::map_worst(std::max(1, count), workers, &arg, [&](int i) {
                    return -heintze_karcher_slack(make_random(i), f);
                });
            if (worst > 1e-8 && !arg.empty())
                out.offending = support_body_to_json(make_random(arg[0]));
            return worst;
        });

        run.run(tag + "/minkowski_residual", 1e-6, [&](CheckOutcome&) {
            return detail::map_worst(std::max(1, count), workers, nullptr, [&](int i) {
                auto body = make_random(i);
                return std::abs(minkowski_residual(body, f, 1)) / aniso_area(body, f);
            });
        });

        run.run(tag + "/radius_sandwich", 1e-8, [&](CheckOutcome&) {
            // Vol/|M|_gamma <= r <= R <= |M|_gamma^n / ((n+1)^{n-1} Vol(W) Vol^{n-1})
            return detail::map_worst(std::max(1, count / 2), workers, nullptr, [&](int i) {
                auto body = make_random(i);
                auto io = inner_outer_radius(body, f);
                const double area = aniso_area(body, f);
                const double lower = volume(body) / area;
                const double upper = area / volW;  // n = 1 form
                return std::max({lower - io.r, io.r - io.R, io.R - upper});
            });
        });

        if (opt.include_measures) {
            auto sq = make_unit_square();
            run.run(tag + "/projection_optimality", 1e-10, [&](CheckOutcome&) {
                RandomStream rng(seed ^ 0x771234);
                double worst = -std::numeric_limits<double>::infinity();
                for (int t = 0; t < 25; ++t) {
                    const Eigen::Vector2d x(3.0 * rng.next_sym(), 3.0 * rng.next_sym());
                    auto pr = metric_projection(sq, f, x);
                    if (pr.interior) continue;
                    for (int e = 0; e < 4; ++e)
                        for (int s = 0; s <= 6; ++s) {
                            Eigen::Vector2d q = sq.edge_a(e) +
                                                (s / 6.0) * (sq.edge_b(e) - sq.edge_a(e));
                            worst = std::max(worst,
                                             pr.dist - gamma0(f, Eigen::Vector2d(x - q)));
                        }
                }
                return worst;
            });

            run.run(tag + "/phi_additivity", 0.0, [&](CheckOutcome&) {
                const auto b1 = RegionSpec<2>::box({-0.1, -0.1}, {0.4, 0.4});
                const auto b2 = RegionSpec<2>::box({0.6, -0.1}, {1.1, 0.4});
                const double eps = 0.05;
                auto e1 = local_parallel_volume(sq, f, b1, eps, opt.mc_samples, seed + 1,
                                                workers);
                auto e2 = local_parallel_volume(sq, f, b2, eps, opt.mc_samples, seed + 2,
                                                workers);
                auto u1 = local_parallel_volume(sq, f, b1, eps, opt.mc_samples, seed + 3,
                                                workers);
                auto u2 = local_parallel_volume(sq, f, b2, eps, opt.mc_samples, seed + 3,
                                                workers);
                const double se =
                    std::sqrt(e1.std_error * e1.std_error + e2.std_error * e2.std_error +
                              u1.std_error * u1.std_error + u2.std_error * u2.std_error);
                return std::abs(e1.value + e2.value - u1.value - u2.value) - 4.0 * se;
            });

            run.run(tag + "/phi_global_consistency", 0.0, [&](CheckOutcome&) {
                auto eps = default_eps_grid(sq);
                auto fit = steiner_fit_local(sq, f, RegionSpec<2>::all(), eps,
                                             opt.mc_samples, seed + 9, workers);
                auto mv = steiner_fit_global(sq, f, eps);
                double worst = -std::numeric_limits<double>::infinity();
                for (int r = 0; r <= 1; ++r)
                    worst = std::max(worst, std::abs(fit.phi[r] - mv.V[r]) -
                                                (4.0 * fit.phi_se[r] + 0.02 * mv.V[r]));
                return worst;
            });
        }

        run.run(tag + "/reach_representation", 1e-6, [&](CheckOutcome&) {
            double worst = 0;
            for (double rho : {0.5, 1.0, 2.0})
                worst = std::max(worst, volume_via_reach_check(rho, f));
            return worst;
        });

        run.run(tag + "/flow_stationarity", 1e-12, [&](CheckOutcome&) {
            auto rhs = flow_rhs(make_wulff_body(f), f, 1, 1.0);
            return rhs.abs().maxCoeff();
        });
    }
    return rep;
}

}  // namespace wulff
