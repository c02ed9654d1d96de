#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fastrates/conditions.hpp"
#include "fastrates/learners.hpp"
#include "fastrates/problems.hpp"

using namespace fastrates;

TEST_CASE("bernoulli01: eta_max closed form at each margin") {
    CHECK(bernoulli_eta_max(0.75) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(bernoulli_eta_max(0.5) == 0.0);
    CHECK(bernoulli_eta_max(1.0) == kInf);

    auto recipe = bernoulli_01(0.25, 4);
    // single-law slices reproduce the closed form through the generic checker
    for (const auto& P : recipe.problem.p_family) {
        DecisionProblem slice = recipe.problem;
        slice.p_family = {P};
        const double p = risk(P, {0.0}, slice.loss);  // E[Z] = P(Z=1)
        const double expect = bernoulli_eta_max(p);
        const double got = max_eta(slice, ConditionKind::Central, 0.0, SearchFamily{});
        if (expect == kInf)
            CHECK(got == doctest::Approx(1e6));
        else
            CHECK(got == doctest::Approx(expect).epsilon(1e-5));
    }
    // whole-family eta_max is governed by the smallest margin
    const double fam = max_eta(recipe.problem, ConditionKind::Central, 0.0, SearchFamily{});
    CHECK(fam == doctest::Approx(recipe.expected.at("eta_max_at_min_margin")).epsilon(1e-5));
    // delta = 0 includes p = 1/2 and kills the condition
    auto flat = bernoulli_01(0.0, 8);
    CHECK(max_eta(flat.problem, ConditionKind::Central, 0.0, SearchFamily{}) == 0.0);
    // enlarging the grid (hence the family) never increases eta_max
    auto fine = bernoulli_01(0.25, 2);
    const double coarse = max_eta(fine.problem, ConditionKind::Central, 0.0, SearchFamily{});
    CHECK(coarse >= fam - 1e-9);
}

TEST_CASE("sqbounded: classical mixability at 1/B^2, mean fails in between") {
    for (double B : {1.0, 2.0}) {
        auto recipe = bounded_squared(B, 9, 9);
        const double eta_mix = recipe.expected.at("classical_mixable_eta");
        CHECK(eta_mix == doctest::Approx(1.0 / (B * B)));
        CHECK(recipe.expected.at("exp_concave_eta") == doctest::Approx(1.0 / (4 * B * B)));
        SearchFamily search;
        search.decision_grid = 201;
        const auto rep = check_condition(recipe.problem, ConditionKind::ClassicalMix, eta_mix,
                                         0.0, search);
        CHECK(rep.verdict == Verdict::Holds);
        // mean substitution fails pointwise mixability between 1/(4B^2) and 1/B^2
        const double eta_mid = 0.9 / (B * B);
        const auto ec = check_condition(recipe.problem, ConditionKind::StochExpConcave, eta_mid,
                                        0.0, search);
        CHECK(ec.verdict == Verdict::RefutedOnTestedFamily);
        // and holds at the exp-concavity threshold on point masses
        const auto ok = check_condition(recipe.problem, ConditionKind::StochExpConcave,
                                        1.0 / (4 * B * B), 0.0, search);
        CHECK(ok.verdict == Verdict::Holds);
    }
}

TEST_CASE("subgauss: central holds at 1/sigma^2; point masses at any rate") {
    for (double s2 : {0.5, 1.0, 2.0}) {
        auto recipe = subgaussian_location(s2, 1.0, 5);
        const auto rep = check_condition(recipe.problem, ConditionKind::Central, 1.0 / s2, 0.0,
                                         SearchFamily{});
        CHECK(rep.verdict == Verdict::Holds);
    }
    DecisionProblem pm;
    pm.loss = make_squared();
    pm.p_family = {point_mass(0.5)};
    pm.model = Model::from_scalars({0.5, 1.0});
    pm.decision_set = pm.model;
    CHECK(max_eta(pm, ConditionKind::Central, 0.0, SearchFamily{}) == doctest::Approx(1e6));
}

TEST_CASE("normloc: the admissible central rate is exactly 1") {
    std::vector<double> mus;
    for (double m = -2.0; m <= 2.0 + 1e-9; m += 0.25) mus.push_back(m);
    auto recipe = normal_location_logloss({0.0, 0.5}, mus);
    const double v = max_eta(recipe.problem, ConditionKind::Central, 0.0, SearchFamily{});
    CHECK(v == doctest::Approx(recipe.expected.at("central_eta")).epsilon(1e-4));
    // f = f*: zero excess
    const auto ms = excess_loss_moments(recipe.problem.p_family[0], {0.0}, {0.0},
                                        recipe.problem.loss);
    CHECK(ms.mean == 0.0);
    CHECK(ms.variance == 0.0);
}

TEST_CASE("heavytail: divergent exponential moments but a linear Bernstein envelope") {
    auto recipe = heavy_tail_squared();
    CHECK(recipe.expected.at("central_eta") == 0.0);
    const auto rep =
        check_condition(recipe.problem, ConditionKind::Central, 1.0, 0.0, SearchFamily{});
    CHECK(rep.verdict == Verdict::RefutedOnTestedFamily);
    CHECK(rep.infinite_moment);
    const auto bern = check_bernstein(
        recipe.problem, VFunction::power(recipe.expected.at("bernstein_u_coeff"), 1.0));
    CHECK(bern.verdict == Verdict::Holds);
    // mu = 0 equals the optimum: zero excess
    const auto ms = excess_loss_moments(recipe.problem.p_family[0], {0.0}, {0.0},
                                        recipe.problem.loss);
    CHECK(ms.mean == 0.0);
    // MC moments agree with the oracle values on the excess loss
    const auto ms2 = excess_loss_moments(recipe.problem.p_family[0], {0.5}, {0.0},
                                         recipe.problem.loss);
    CHECK(ms2.mean == doctest::Approx(0.125).epsilon(1e-12));  // mu^2/2
    Sampler raw = recipe.problem.p_family[0].sampler();
    raw.moments.reset();
    const auto msmc = excess_loss_moments(Distribution::sampler(raw), {0.5}, {0.0},
                                          recipe.problem.loss, McPolicy{3, 400000});
    CHECK(std::abs(msmc.mean - 0.125) < 3 * msmc.ci_halfwidth + 1e-3);
}

TEST_CASE("brier: losses and pointwise mixability at eta = 1") {
    auto recipe = brier(2, 11);
    // point-mass forecast on the realized outcome has zero loss
    CHECK(recipe.problem.loss->evaluate({0.0, 1.0}, Outcome{1.0, -1}) == 0.0);
    // uniform forecast on two outcomes loses 1/2
    CHECK(recipe.problem.loss->evaluate({0.5, 0.5}, Outcome{0.0, -1}) == doctest::Approx(0.5));
    SearchFamily search;
    const auto rep = check_condition(recipe.problem, ConditionKind::ClassicalMix,
                                     recipe.expected.at("classical_mixable_eta"), 0.0, search);
    CHECK(rep.verdict == Verdict::Holds);
}

TEST_CASE("recipe_by_name: lookup and unknown names") {
    CHECK(recipe_by_name("bernoulli01", {{"delta", 0.25}}).name == "bernoulli01");
    CHECK(recipe_by_name("sqbounded", {}).name == "sqbounded");
    CHECK(recipe_by_name("subgauss", {}).name == "subgauss");
    CHECK(recipe_by_name("normloc", {}).name == "normloc");
    CHECK(recipe_by_name("heavytail", {}).name == "heavytail");
    CHECK(recipe_by_name("brier", {}).name == "brier");
    CHECK_THROWS_AS(recipe_by_name("nope", {}), ConfigError);
}

TEST_CASE("normloc grid ERM tracks the 1/(2n) excess law at moderate n") {
    std::vector<double> mus;
    for (double m = -1.0; m <= 1.0 + 1e-9; m += 0.01) mus.push_back(m);
    auto recipe = normal_location_logloss({0.0}, mus);
    const auto curve = rate_experiment(recipe.problem, ErmLearner{}, {256, 1024}, 400, 31);
    for (size_t i = 0; i < curve.ns.size(); ++i) {
        const double expect = 0.5 / curve.ns[i];
        CHECK(std::abs(curve.excess[i] - expect) < 0.15 * expect + 2 * curve.stderr_excess[i]);
    }
}
