#include <catch2/catch.hpp>

#include <cmath>

#include "wulff/anisotropy.hpp"
#include "wulff/body.hpp"

using namespace wulff;

namespace {

// independent symbolic oracle for trig-series gamma: value and A = g'' + g
struct TrigOracle {
    double a0;
    std::vector<GammaTerm> terms;
    double value(double t) const {
        double v = a0;
        for (auto& tm : terms) v += tm.a * std::cos(tm.m * t) + tm.b * std::sin(tm.m * t);
        return v;
    }
    double a_gamma(double t) const {
        double v = a0;
        for (auto& tm : terms)
            v += (1.0 - tm.m * tm.m) * (tm.a * std::cos(tm.m * t) + tm.b * std::sin(tm.m * t));
        return v;
    }
};

// brute-force dual norm: max over a dense fan of angles
double gamma0_brute(const GammaSpec& spec, const Eigen::Vector2d& z, int count = 1000000) {
    Gamma1D g = make_gamma1d(spec);
    double best = -1e300;
    for (int i = 0; i < count; ++i) {
        const double t = 2.0 * M_PI * i / count;
        const double v = (z[0] * std::cos(t) + z[1] * std::sin(t)) / g.value(t);
        best = std::max(best, v);
    }
    return best;
}

}  // namespace

TEST_CASE("isotropic field: A_gamma is the identity") {
    SphereGrid<1> g(256);
    auto f = build_anisotropy(GammaSpec::constant(1, 1.0), g);
    for (int i = 0; i < g.size(); ++i) {
        REQUIRE(f.gamma[i] == Approx(1.0).margin(1e-14));
        REQUIRE(f.a_gamma[i](0, 0) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("trig gamma matches the symbolic oracle") {
    SphereGrid<1> g(256);
    GammaSpec spec = GammaSpec::trig1(1.0, {{3, 0.05, 0.0}});
    TrigOracle oracle{1.0, {{3, 0.05, 0.0}}};
    auto f = build_anisotropy(spec, g);
    for (int i = 0; i < g.size(); ++i) {
        REQUIRE(f.gamma[i] == Approx(oracle.value(g.theta(i))).margin(1e-13));
        REQUIRE(f.a_gamma[i](0, 0) == Approx(oracle.a_gamma(g.theta(i))).margin(1e-11));
    }
    REQUIRE(f.a_gamma[0](0, 0) == Approx(0.6).margin(1e-11));
}

TEST_CASE("admissibility rejection with worst node report") {
    SphereGrid<1> g(256);
    GammaSpec spec = GammaSpec::trig1(1.0, {{3, 0.2, 0.0}});
    try {
        build_anisotropy(spec, g);
        FAIL("expected AdmissibilityError");
    } catch (const AdmissibilityError& e) {
        REQUIRE(e.worst_eig == Approx(-0.6).margin(1e-9));
        // worst node sits where cos(3 theta) = 1
        const double t = g.theta(e.worst_node);
        REQUIRE(std::abs(std::cos(3 * t) - 1.0) < 1e-9);
    }
}

TEST_CASE("positivity rejection") {
    SphereGrid<1> g(64);
    GammaSpec spec = GammaSpec::trig1(0.1, {{1, 0.5, 0.0}});
    REQUIRE_THROWS_AS(build_anisotropy(spec, g), PositivityError);
}

TEST_CASE("gamma0: euclidean, zero, and ellipse gauge") {
    SphereGrid<1> g(256);
    auto iso = build_anisotropy(GammaSpec::constant(1, 1.0), g);
    REQUIRE(gamma0(iso, {3.0, 4.0}) == Approx(5.0).epsilon(1e-12));
    REQUIRE(gamma0(iso, {0.0, 0.0}) == 0.0);

    GammaSpec espec = GammaSpec::ellipse({2.0, 1.0});
    auto ell = build_anisotropy(espec, g);
    REQUIRE(gamma0(ell, {1.0, 0.0}) == Approx(0.5).epsilon(1e-10));
    // gauge of W: sqrt(z1^2/4 + z2^2)
    REQUIRE(gamma0(ell, {1.0, 1.0}) == Approx(std::sqrt(0.25 + 1.0)).epsilon(1e-10));
    REQUIRE(gamma0(ell, {1.0, 0.0}) == Approx(gamma0_brute(espec, {1.0, 0.0})).epsilon(1e-8));

    GammaSpec tspec = GammaSpec::trig1(1.0, {{3, 0.05, 0.0}});
    auto tri = build_anisotropy(tspec, g);
    const Eigen::Vector2d z(0.3, -1.1);
    REQUIRE(gamma0(tri, z) == Approx(gamma0_brute(tspec, z)).epsilon(1e-9));
}

TEST_CASE("gamma0 positive homogeneity") {
    SphereGrid<1> g(256);
    auto f = build_anisotropy(GammaSpec::trig1(1.0, {{3, 0.05, 0.0}, {2, 0.0, 0.03}}), g);
    const Eigen::Vector2d z(0.7, 0.41);
    const double g1 = gamma0(f, z);
    for (double t : {0.25, 2.0, 17.5}) {
        REQUIRE(gamma0(f, Eigen::Vector2d(t * z)) == Approx(t * g1).margin(1e-10 * t * g1 + 1e-13));
    }
}

TEST_CASE("wulff point map and duality round trip") {
    SphereGrid<1> g(512);
    auto iso = build_anisotropy(GammaSpec::constant(1, 1.0), g);
    for (int i : {0, 17, 301}) {
        REQUIRE((wulff_point(iso, i) - iso.grid->node(i)).norm() < 1e-12);
    }

    auto f = build_anisotropy(GammaSpec::trig1(1.0, {{3, 0.05, 0.0}}), g);
    const auto p0 = wulff_point(f, 0);
    REQUIRE(p0[0] == Approx(1.05).margin(1e-11));
    REQUIRE(p0[1] == Approx(0.0).margin(1e-11));

    double worst = 0;
    for (int i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(gamma0(f, wulff_point(f, i)) - 1.0));
    REQUIRE(worst < 1e-6);
}

TEST_CASE("anisotropic distance") {
    SphereGrid<1> g(256);
    auto iso = build_anisotropy(GammaSpec::constant(1, 1.0), g);
    REQUIRE(d_W(iso, {0, 0}, {3, 4}) == Approx(5.0).epsilon(1e-12));
    REQUIRE(d_W(iso, {1, 2}, {1, 2}) == 0.0);

    auto ell = build_anisotropy(GammaSpec::ellipse({2.0, 1.0}), g);
    REQUIRE(d_W(ell, {0, 0}, {2, 0}) == Approx(1.0).epsilon(1e-10));

    // triangle inequality on a fan of points
    auto f = build_anisotropy(GammaSpec::trig1(1.0, {{3, 0.05, 0.0}}), g);
    const Eigen::Vector2d a(0.1, 0.2), b(-0.7, 0.9), c(1.3, -0.4);
    REQUIRE(d_W(f, a, c) <= d_W(f, a, b) + d_W(f, b, c) + 1e-10);
}

TEST_CASE("norm equivalence of d_W with the euclidean distance") {
    SphereGrid<1> g(256);
    auto f = build_anisotropy(GammaSpec::trig1(1.0, {{3, 0.05, 0.0}}), g);
    const double gmax = f.gamma.maxCoeff(), gmin = f.gamma.minCoeff();
    const double C = std::max(gmax, 1.0 / gmin);
    unsigned long long s = 12345;
    auto rnd = [&]() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return (double)(s >> 11) / 9007199254740992.0 * 2.0 - 1.0;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Vector2d x(rnd(), rnd()), y(rnd(), rnd());
        if ((y - x).norm() < 1e-9) continue;
        const double dw = d_W(f, x, y), de = (y - x).norm();
        REQUIRE(dw <= C * de * (1 + 1e-9));
        REQUIRE(dw >= de / C * (1 - 1e-9));
    }
}

TEST_CASE("wulff summary identities") {
    SphereGrid<1> g1(512);
    auto iso1 = build_anisotropy(GammaSpec::constant(1, 1.0), g1);
    auto s1 = wulff_summary(iso1);
    REQUIRE(s1.vol == Approx(M_PI).epsilon(1e-10));
    REQUIRE(s1.area_gamma == Approx(2 * M_PI).epsilon(1e-10));

    auto tri = build_anisotropy(GammaSpec::trig1(1.0, {{3, 0.05, 0.0}}), g1);
    auto st = wulff_summary(tri);
    REQUIRE(st.area_gamma == Approx(2.0 * st.vol).margin(1e-8));

    SphereGrid<2> g2(32, 64);
    auto iso2 = build_anisotropy(GammaSpec::constant(2, 1.0), g2);
    auto s2 = wulff_summary(iso2);
    REQUIRE(s2.vol == Approx(4.0 * M_PI / 3.0).epsilon(1e-8));
    REQUIRE(s2.area_gamma == Approx(4.0 * M_PI).epsilon(1e-8));
}

TEST_CASE("gauge acceleration matches the reference evaluator") {
    SphereGrid<1> g(512);
    auto f = build_anisotropy(GammaSpec::trig1(1.0, {{3, 0.05, 0.0}, {2, 0.02, 0.01}}), g);
    GaugeAccel<1> fast(f);
    unsigned long long s = 999;
    auto rnd = [&]() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return (double)(s >> 11) / 9007199254740992.0 * 4.0 - 2.0;
    };
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
        const Eigen::Vector2d z(rnd(), rnd());
        worst = std::max(worst, std::abs(fast(z) - gamma0(f, z)));
    }
    REQUIRE(worst < 1e-10);
}

TEST_CASE("n=2 field: constant and legendre anisotropy") {
    SphereGrid<2> g(32, 64);
    auto iso = build_anisotropy(GammaSpec::constant(2, 2.0), g);
    for (int i = 0; i < g.size(); i += 97) {
        REQUIRE(iso.a_min_eig[i] == Approx(2.0).margin(1e-8));
        REQUIRE(iso.a_max_eig[i] == Approx(2.0).margin(1e-8));
    }
    REQUIRE(gamma0(iso, {0, 3, 4}) == Approx(2.5).epsilon(1e-9));

    GammaSpec spec;
    spec.n = 2;
    spec.kind = GammaSpec::Kind::Trig;
    spec.a0 = 1.0;
    spec.terms = {{2, 0.05, 0.0}};
    auto f = build_anisotropy(spec, g);
    REQUIRE(f.a_min_eig.minCoeff() > 0.5);

    auto ell = build_anisotropy(GammaSpec::ellipse({2.0, 1.0, 1.0}), g);
    REQUIRE(gamma0(ell, {1, 0, 0}) == Approx(0.5).epsilon(1e-8));
    REQUIRE(gamma0(ell, {0, 0, 2}) == Approx(2.0).epsilon(1e-8));
}
