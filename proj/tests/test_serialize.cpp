#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fastrates/problems.hpp"
#include "fastrates/rng.hpp"
#include "fastrates/serialize.hpp"

using namespace fastrates;

TEST_CASE("distribution json round trip preserves the measure") {
    Stream st(61, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t k = 2 + st.bits() % 4;
        std::vector<double> ys, ps;
        auto w = dirichlet_uniform(st, k);
        for (size_t i = 0; i < k; ++i) ys.push_back(st.uniform01() * 4 - 2);
        const auto d = Distribution::finite_scalar(ys, w);
        const auto back = distribution_from_json(distribution_to_json(d));
        REQUIRE(back.is_finite_support());
        const auto& fs = back.finite_support();
        for (size_t i = 0; i < k; ++i) {
            CHECK(fs.outcomes[i].y == ys[i]);
            CHECK(fs.probs[i] == w[i]);
        }
    }
    // sampler spec survives by name + params
    const auto g = gaussian_sampler(0.25, 2.0);
    const auto gb = distribution_from_json(distribution_to_json(g));
    CHECK(gb.sampler().name == "gaussian");
    CHECK(gb.moments()->mean == doctest::Approx(0.25));
}

TEST_CASE("problem json round trip preserves risks") {
    auto recipe = bounded_squared(1.0, 5, 5);
    const auto j = problem_to_json(recipe.problem);
    const auto back = problem_from_json(j);
    CHECK(back.model.size() == recipe.problem.model.size());
    for (size_t p = 0; p < back.p_family.size(); ++p)
        for (size_t f = 0; f < back.model.size(); ++f)
            CHECK(risk(back.p_family[p], back.model[f], back.loss) ==
                  doctest::Approx(risk(recipe.problem.p_family[p], recipe.problem.model[f],
                                       recipe.problem.loss)));
    // conditional outcomes serialize as [x, y] pairs
    std::vector<Outcome> outs{{0.0, 0}, {1.0, 1}};
    const auto joint = Distribution::finite(outs, {0.5, 0.5});
    const auto jj = distribution_to_json(joint);
    const auto jback = distribution_from_json(jj);
    CHECK(jback.finite_support().outcomes[1].x == 1);
}

TEST_CASE("report json carries verdicts, witnesses, and infinities") {
    ConditionReport r;
    r.kind = ConditionKind::StochMix;
    r.eta = 0.5;
    r.eps = 0.0;
    r.verdict = Verdict::RefutedOnTestedFamily;
    r.worst_margin = 0.25;
    r.witness = {1, {0.5, 0.5}, 0};
    const auto j = report_to_json(r);
    CHECK(j["kind"] == "stoch_mix");
    CHECK(j["verdict"] == "refuted_on_tested_family");
    CHECK(j["witness"]["p_index"] == 1);
    CHECK(j["witness"]["pi"].size() == 2);
    r.worst_margin = kInf;
    r.infinite_moment = true;
    const auto j2 = report_to_json(r, "bernstein");
    CHECK(j2["kind"] == "bernstein");
    CHECK(j2["worst_margin"] == "inf");
    CHECK(j2["infinite_moment"] == true);
}

TEST_CASE("format_g17 writes dot-decimal, full-precision numbers") {
    CHECK(format_g17(0.1) == "0.10000000000000001");
    CHECK(format_g17(-0.021) == "-0.021000000000000001");
    const double v = 1.0 / 3.0;
    CHECK(std::stod(format_g17(v)) == v);  // round trip
}

TEST_CASE("rate curve csv has the fixed column layout") {
    RateCurve c;
    c.ns = {64, 128};
    c.excess = {0.5, 0.25};
    c.stderr_excess = {0.01, 0.005};
    c.slope = -1.0;
    const auto csv = rate_curve_csv(c, "erm", "bernoulli01", 7);
    CHECK(csv.find("n,excess,stderr,learner,problem,seed\n") == 0);
    CHECK(csv.find("64,0.5,0.01,erm,bernoulli01,7\n") != std::string::npos);
    const auto j = rate_curve_summary(c, "erm", "bernoulli01", 7);
    CHECK(j["slope"] == -1.0);
    CHECK(j["ns"].size() == 2);
}
