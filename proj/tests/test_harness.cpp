#include <catch2/catch.hpp>

#include <sstream>

#include "wulff/serialize.hpp"
#include "wulff/toml_lite.hpp"
#include "wulff/verify.hpp"

using namespace wulff;

TEST_CASE("random bodies: determinism, convexity, seed separation") {
    SphereGrid<1> g(256);
    RandomBodySpec rs;
    rs.seed = 42;
    rs.n = 1;
    rs.modes = 0;
    auto ball = random_convex_body(rs, g);
    REQUIRE((ball.h - 1.0).abs().maxCoeff() == 0.0);

    rs.modes = 6;
    rs.margin = 0.1;
    auto a = random_convex_body(rs, g);
    REQUIRE(check_convex(a, 0.1).ok);
    auto a2 = random_convex_body(rs, g);
    REQUIRE((a.h - a2.h).abs().maxCoeff() == 0.0);

    rs.seed = 43;
    auto b = random_convex_body(rs, g);
    REQUIRE((a.h - b.h).abs().maxCoeff() > 1e-6);
}

TEST_CASE("support body json round trip is exact") {
    SphereGrid<1> g(128);
    RandomBodySpec rs;
    rs.seed = 5;
    rs.n = 1;
    rs.modes = 5;
    auto body = random_convex_body(rs, g);
    body.offset = {0.125, -3.7e-13};
    auto j = support_body_to_json(body);
    const std::string text = j.dump();
    auto back = support_body_from_json<1>(nlohmann::json::parse(text), g);
    REQUIRE((back.h - body.h).abs().maxCoeff() == 0.0);
    REQUIRE((back.offset - body.offset).norm() == 0.0);
}

TEST_CASE("polytope json round trip") {
    auto sq = make_unit_square();
    auto j = polytope_to_json(sq);
    auto back = polytope_from_json<2>(j);
    REQUIRE(back.verts.size() == 4);
    REQUIRE(back.area() == Approx(1.0));
}

TEST_CASE("monitor csv round trip") {
    std::vector<MonitorRecord> rs(3);
    rs[0].t = 0;
    rs[1].t = 0.12345678901234567;
    rs[1].I = 1.0 + 1e-9;
    rs[2].t = 7;
    rs[2].dt = 3.5e-6;
    const std::string csv = monitors_to_csv(rs);
    write_text_file("/tmp/wulff_test_monitors.csv", csv);
    auto back = monitors_from_csv("/tmp/wulff_test_monitors.csv");
    REQUIRE(back.size() == 3);
    REQUIRE(back[1].t == rs[1].t);
    REQUIRE(back[1].I == rs[1].I);
    REQUIRE(back[2].dt == rs[2].dt);
    REQUIRE_THROWS_AS(monitors_from_csv("/tmp/definitely_not_there.csv"), MissingRunError);
}

TEST_CASE("toml subset parser") {
    std::istringstream in(
        "# comment\n"
        "alpha = 2.0\n"
        "k = 1\n"
        "renormalize = true\n"
        "out = \"run_a\"  # trailing\n"
        "[flow]\n"
        "tol = 1e-3\n");
    auto t = parse_toml(in);
    REQUIRE(t.at("alpha").as_number() == 2.0);
    REQUIRE(t.at("k").as_number() == 1.0);
    REQUIRE(t.at("renormalize").as_bool());
    REQUIRE(t.at("out").as_string() == "run_a");
    REQUIRE(t.at("flow.tol").as_number() == 1e-3);

    std::istringstream bad("x =\n");
    REQUIRE_THROWS_AS(parse_toml(bad), ParseError);
}

TEST_CASE("gamma spec json round trip") {
    auto j = nlohmann::json::parse(
        R"({"n":1,"kind":"trig","a0":1.0,"terms":[{"m":3,"a":0.05,"b":0.0}],"grid_size":512})");
    auto spec = parse_gamma_spec(j);
    REQUIRE(spec.n == 1);
    REQUIRE(spec.kind == GammaSpec::Kind::Trig);
    REQUIRE(spec.terms.size() == 1);
    REQUIRE(spec.grid_size == 512);
    auto j2 = gamma_spec_to_json(spec);
    auto spec2 = parse_gamma_spec(j2);
    REQUIRE(spec2.terms[0].a == spec.terms[0].a);

    REQUIRE_THROWS_AS(parse_gamma_spec(nlohmann::json::parse(R"({"n":3,"kind":"constant"})")),
                      ParseError);
}

TEST_CASE("verify suite: fixtures only, all pass") {
    VerifyOptions opt;
    opt.mc_samples = 20000;
    opt.workers = 1;
    auto rep = verify_suite(7, 0, {GammaSpec::constant(1, 1.0)}, opt);
    for (const auto& c : rep.checks) {
        INFO(c.name << " worst " << c.worst << " tol " << c.tol);
        REQUIRE(c.pass);
    }
    REQUIRE(rep.all_pass);
}

TEST_CASE("verify suite: random bodies pass and the report is byte-stable") {
    GammaSpec tri = GammaSpec::trig1(1.0, {{3, 0.05, 0.0}});
    VerifyOptions opt;
    opt.mc_samples = 20000;
    opt.workers = 1;
    auto rep1 = verify_suite(11, 6, {tri}, opt);
    REQUIRE(rep1.all_pass);

    VerifyOptions opt4 = opt;
    opt4.workers = 4;
    auto rep2 = verify_suite(11, 6, {tri}, opt4);
    REQUIRE(report_to_json(rep1).dump() == report_to_json(rep2).dump());
}
