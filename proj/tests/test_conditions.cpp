#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fastrates/conditions.hpp"
#include "fastrates/momentbounds.hpp"
#include "fastrates/problems.hpp"
#include "fastrates/rng.hpp"

using namespace fastrates;

namespace {

DecisionProblem bernoulli_single(double p) {
    DecisionProblem prob;
    prob.loss = make_zero_one();
    prob.p_family = {bernoulli(p)};
    prob.model = Model::from_scalars({0.0, 1.0});
    prob.decision_set = prob.model;
    return prob;
}

// Random bounded-loss problem on a small finite outcome space. Losses are an
// explicit matrix, so there is no structure beyond what the checkers see.
struct TableLoss final : LossBase {
    std::vector<std::vector<double>> table;  // [f][z]
    std::string name() const override { return "table"; }
    double evaluate(const Predictor& f, const Outcome& z) const override {
        return table[static_cast<size_t>(f[0])][static_cast<size_t>(z.y)];
    }
    std::optional<std::pair<double, double>> declared_range() const override {
        return std::make_pair(0.0, 1.0);
    }
};

DecisionProblem random_problem(Stream& st, int min_preds = 2) {
    const size_t K = 2 + st.bits() % 2;  // outcomes
    const size_t N = min_preds + st.bits() % 3;
    auto loss = std::make_shared<TableLoss>();
    loss->table.assign(N, std::vector<double>(K));
    for (auto& row : loss->table)
        for (auto& v : row) v = st.uniform01();
    DecisionProblem prob;
    prob.loss = loss;
    const size_t nP = 1 + st.bits() % 3;
    for (size_t i = 0; i < nP; ++i) {
        auto w = dirichlet_uniform(st, K);
        std::vector<double> ys;
        for (size_t k = 0; k < K; ++k) ys.push_back(static_cast<double>(k));
        prob.p_family.push_back(Distribution::finite_scalar(ys, std::move(w)));
    }
    Model m;
    m.embedded = false;  // table losses have no geometric embedding
    for (size_t f = 0; f < N; ++f) m.predictors.push_back({static_cast<double>(f)});
    prob.model = std::move(m);
    prob.decision_set = prob.model;
    return prob;
}

}  // namespace

TEST_CASE("central: bernoulli p=3/4 holds exactly up to eta = ln 3") {
    const auto prob = bernoulli_single(0.75);
    SearchFamily search;
    const auto at_max = check_condition(prob, ConditionKind::Central, std::log(3.0), 0.0, search);
    CHECK(at_max.verdict == Verdict::Holds);
    CHECK(at_max.worst_margin == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at_max.witness.f == 0);  // margin attained at the suboptimal label

    const auto beyond = check_condition(prob, ConditionKind::Central, 1.2, 0.0, search);
    CHECK(beyond.verdict == Verdict::RefutedOnTestedFamily);
    CHECK(beyond.witness.p_index == 0);
}

TEST_CASE("central: well-specified finite log-loss problem holds at eta = 1") {
    DecisionProblem prob;
    prob.loss = make_pmf_log();
    Model m;
    m.predictors = {{0.3, 0.7}, {0.6, 0.4}, {0.5, 0.5}};
    prob.model = m;
    prob.decision_set = m;
    for (const auto& f : m.predictors)
        prob.p_family.push_back(Distribution::finite_scalar({0.0, 1.0}, {f[0], f[1]}));
    const auto rep = check_condition(prob, ConditionKind::Central, 1.0, 0.0, SearchFamily{});
    CHECK(rep.verdict == Verdict::Holds);
    CHECK(rep.worst_margin <= 1e-12);
}

TEST_CASE("stochastic mixability: 0/1 loss refuted for every eta") {
    // p = 1/2 in the family: the uniform mixture is a witness at any eta.
    for (double eta : {0.25, 1.0, 4.0}) {
        auto prob = bernoulli_single(0.5);
        const auto rep = check_condition(prob, ConditionKind::StochMix, eta, 0.0, SearchFamily{});
        CHECK(rep.verdict == Verdict::RefutedOnTestedFamily);
        // symmetric two-sided family at delta = 0.25: still refuted
        DecisionProblem two = bernoulli_single(0.75);
        two.p_family.push_back(bernoulli(0.25));
        const auto rep2 = check_condition(two, ConditionKind::StochMix, eta, 0.0, SearchFamily{});
        CHECK(rep2.verdict == Verdict::RefutedOnTestedFamily);
    }
}

TEST_CASE("max_eta: bernoulli anchors") {
    SearchFamily search;
    SUBCASE("p = 3/4 gives ln 3") {
        const auto prob = bernoulli_single(0.75);
        const double v = max_eta(prob, ConditionKind::Central, 0.0, search);
        CHECK(v == doctest::Approx(std::log(3.0)).epsilon(1e-6));
    }
    SUBCASE("p = 1/2 gives 0") {
        const auto prob = bernoulli_single(0.5);
        CHECK(max_eta(prob, ConditionKind::Central, 0.0, search) == 0.0);
    }
    SUBCASE("deterministic labels hit the cap") {
        const auto prob = bernoulli_single(1.0);
        CHECK(max_eta(prob, ConditionKind::Central, 0.0, search) == doctest::Approx(1e6));
    }
}

TEST_CASE("max_eta: subgaussian squared loss reaches 1/sigma^2") {
    auto recipe = subgaussian_location(1.0, 1.0, 5);
    const double v = max_eta(recipe.problem, ConditionKind::Central, 0.0, SearchFamily{});
    CHECK(v >= 1.0 - 1e-5);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-4));  // exact threshold for the pure gaussian family
    // mixture family: subgaussian proxy variance 1 + m^2
    const double M = 1.5;
    DecisionProblem prob;
    prob.loss = make_squared();
    prob.p_family = {gaussian_symmetric_mixture(M)};
    prob.model = Model::from_scalars({-M, 0.0, M});
    prob.decision_set = prob.model;
    const double vm = max_eta(prob, ConditionKind::Central, 0.0, SearchFamily{});
    CHECK(vm >= 1.0 / (1.0 + M * M) - 1e-6);
}

TEST_CASE("fact-1 monotonicity: holds at eta implies holds at smaller eta, larger eps") {
    Stream st(11, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto prob = random_problem(st);
        SearchFamily search;
        search.seed = 100 + trial;
        const double eta0 = max_eta(prob, ConditionKind::Central, 0.0, search);
        if (eta0 <= 0 || eta0 >= 1e6) continue;
        for (double frac : {0.25, 0.5, 0.9}) {
            const auto rep =
                check_condition(prob, ConditionKind::Central, frac * eta0, 0.0, search);
            CHECK(rep.verdict == Verdict::Holds);
        }
        const auto reps = check_condition(prob, ConditionKind::Central, eta0, 0.3, search);
        CHECK(reps.verdict == Verdict::Holds);
        // shrinking the P family never decreases max_eta
        if (prob.p_family.size() >= 2) {
            DecisionProblem sub = prob;
            sub.p_family.pop_back();
            CHECK(max_eta(sub, ConditionKind::Central, 0.0, search) >= eta0 - 1e-9);
        }
    }
}

TEST_CASE("implication lattice on random finite problems") {
    Stream st(17, 3);
    int exercised = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto prob = random_problem(st);
        SearchFamily search;
        search.seed = 500 + trial;
        for (double eta : {0.3, 1.0}) {
            const auto central = check_condition(prob, ConditionKind::Central, eta, 1e-3, search);
            const auto ppc = check_condition(prob, ConditionKind::PPC, eta, 1e-3, search);
            if (central.verdict == Verdict::Holds) {
                CHECK(ppc.verdict == Verdict::Holds);  // central => PPC at matched (eta, eps)
                ++exercised;
            }
            const auto pred = check_condition(prob, ConditionKind::Predictor, eta, 1e-3, search);
            const auto sm = check_condition(prob, ConditionKind::StochMix, eta, 1e-3, search);
            if (pred.verdict == Verdict::Holds) {
                CHECK(sm.verdict == Verdict::Holds);  // predictor => stochastic mixability
                ++exercised;
            }
            if (sm.verdict == Verdict::Holds) {
                CHECK(ppc.verdict == Verdict::Holds);  // F = F_D: mixability => PPC
                ++exercised;
            }
        }
    }
    CHECK(exercised > 10);
}

TEST_CASE("ppc holding for all eps implies central at positive eps (finite problems)") {
    // Well-specified log-loss problems satisfy strong PPC; central must follow.
    Stream st(23, 1);
    for (int trial = 0; trial < 10; ++trial) {
        DecisionProblem prob;
        prob.loss = make_pmf_log();
        Model m;
        const size_t N = 2 + st.bits() % 3;
        for (size_t f = 0; f < N; ++f) {
            auto w = dirichlet_uniform(st, 2);
            for (auto& x : w) x = std::max(x, 0.05);
            const double tot = w[0] + w[1];
            m.predictors.push_back({w[0] / tot, w[1] / tot});
        }
        prob.model = m;
        prob.decision_set = m;
        for (const auto& f : m.predictors)
            prob.p_family.push_back(Distribution::finite_scalar({0.0, 1.0}, {f[0], f[1]}));
        SearchFamily search;
        search.seed = trial;
        const auto ppc0 = check_condition(prob, ConditionKind::PPC, 1.0, 0.0, search);
        REQUIRE(ppc0.verdict == Verdict::Holds);
        for (double eps : {1e-6, 1e-3}) {
            const auto cc = check_condition(prob, ConditionKind::Central, 1.0, eps, search);
            CHECK(cc.verdict == Verdict::Holds);
        }
    }
}

TEST_CASE("check_bernstein: constant envelope always holds on bounded losses") {
    Stream st(31, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto prob = random_problem(st);
        // losses in [0,1]: second moment of the excess is at most 1
        const auto rep = check_bernstein(prob, VFunction::constant(1.0));
        CHECK(rep.verdict == Verdict::Holds);
    }
}

TEST_CASE("check_bernstein: normal location refutes u(x) = Bx with far witnesses") {
    std::vector<double> mus;
    for (double m = -32.0; m <= 32.0 + 1e-9; m += 2.0) mus.push_back(m);
    auto recipe = normal_location_logloss({0.0}, mus);
    for (double B : {1.0, 4.0, 16.0}) {
        const auto rep = check_bernstein(recipe.problem, VFunction::power(B, 1.0));
        CHECK(rep.verdict == Verdict::RefutedOnTestedFamily);
        const double mu = recipe.problem.model[rep.witness.f][0];
        CHECK(std::abs(mu) >= std::sqrt(32.0 * B));
    }
    // variance form cannot refute u(x) = Bx for B >= 2 on this family
    const auto var_rep =
        check_bernstein(recipe.problem, VFunction::power(2.0, 1.0), BernsteinForm::Variance);
    CHECK(var_rep.verdict == Verdict::Holds);
}

TEST_CASE("check_bernstein: heavy-tail squared loss satisfies the linear envelope") {
    auto recipe = heavy_tail_squared();
    const double coeff = recipe.expected.at("bernstein_u_coeff");
    const auto rep = check_bernstein(recipe.problem, VFunction::power(coeff, 1.0));
    CHECK(rep.verdict == Verdict::Holds);
    // shape violation: u must be nondecreasing with nonincreasing slope
    CHECK_THROWS_AS(check_bernstein(recipe.problem, VFunction::power(1.0, 2.0)), ShapeViolation);
}

TEST_CASE("bernstein_to_v: anchors") {
    SUBCASE("power u with a = b = 1") {
        const auto v = bernstein_to_v(VFunction::power(2.0, 0.5), 1.0, 1.0);
        const double c1 = 1.0 / kappa(2.0);
        CHECK(v(0.25) == doctest::Approx(std::min(c1 / 2.0 * std::sqrt(0.25), 1.0)).epsilon(1e-12));
        CHECK(v.alpha() == doctest::Approx(0.5));
    }
    SUBCASE("u(x) = x gives the constant 4/(e^2 - 3), capped at 1") {
        const auto v = bernstein_to_v(VFunction::power(1.0, 1.0), 1.0, 1.0);
        const double expect = 4.0 / (std::exp(2.0) - 3.0);
        CHECK(expect == doctest::Approx(0.9113).epsilon(1e-3));
        CHECK(v(0.5) == doctest::Approx(std::min(expect, 1.0)).epsilon(1e-12));
    }
    SUBCASE("constant u marks the trivial regime: v linear in x") {
        const auto v = bernstein_to_v(VFunction::constant(4.0), 1.0, 1.0);
        CHECK(v(0.1) == doctest::Approx(2 * v(0.05)).epsilon(1e-9));
    }
}

TEST_CASE("v_to_bernstein: anchors") {
    SUBCASE("v == 1, a = 1: u(x) = 24 x / (1 + e^{-2})") {
        const auto u = v_to_bernstein(VFunction::constant(1.0), 1.0);
        const double coeff = 24.0 / (1.0 + std::exp(-2.0));
        CHECK(coeff == doctest::Approx(21.14).epsilon(1e-3));
        CHECK(u(0.3) == doctest::Approx(coeff * 0.3).epsilon(1e-12));
    }
    SUBCASE("power v maps exponent 1 - beta back to beta") {
        const auto u = v_to_bernstein(VFunction::power(1.0, 0.25), 1.0);
        CHECK(u.kind() == VFunction::Kind::Power);
        CHECK(u.alpha() == doctest::Approx(0.75));
    }
    SUBCASE("linear v collapses to a constant u") {
        const auto u = v_to_bernstein(VFunction::power(0.5, 1.0), 1.0);
        CHECK(u(0.2) == doctest::Approx(u(0.8)).epsilon(1e-12));
    }
}

TEST_CASE("round trip preserves the power exponent, constants move by kappa ratios") {
    const double B = 3.0, beta = 0.4, a = 1.0, b = 1.0;
    const auto v = bernstein_to_v(VFunction::power(B, beta), a, b);
    CHECK(v.alpha() == doctest::Approx(1.0 - beta));
    const auto u2 = v_to_bernstein(v, a);
    CHECK(u2.alpha() == doctest::Approx(beta).epsilon(1e-12));
    const double bp = v.sup_on(a);
    const double expected_coeff = 6.0 / kappa(-2.0 * bp * a) * B * kappa(2.0 * b * a);
    CHECK(u2.coeff() == doctest::Approx(expected_coeff).epsilon(1e-9));
}

TEST_CASE("minimax_gap: singleton and weak duality") {
    SUBCASE("singleton P and F") {
        DecisionProblem prob;
        prob.loss = make_zero_one();
        prob.p_family = {bernoulli(0.7)};
        prob.model = Model::from_scalars({1.0});
        prob.decision_set = prob.model;
        const auto g = minimax_gap(prob, PredictorMixture::uniform(1), 1.0);
        CHECK(g.supinf == doctest::Approx(g.infsup).epsilon(1e-12));
    }
    SUBCASE("supinf <= infsup always") {
        Stream st(41, 4);
        for (int trial = 0; trial < 30; ++trial) {
            const auto prob = random_problem(st);
            auto pi = PredictorMixture{dirichlet_uniform(st, prob.model.size())};
            const auto g = minimax_gap(prob, pi, 0.5 + st.uniform01());
            CHECK(g.supinf <= g.infsup + 1e-10);
        }
    }
    SUBCASE("bernoulli with nonconvex decision set has a strictly positive gap") {
        DecisionProblem prob = bernoulli_single(0.75);
        prob.p_family.push_back(bernoulli(0.25));
        const auto g = minimax_gap(prob, PredictorMixture::uniform(2), 1.0);
        CHECK(g.infsup - g.supinf > 0.1);
    }
    SUBCASE("convex decision grid on bounded squared loss closes the gap") {
        DecisionProblem prob;
        prob.loss = make_squared(1.0);
        // convex grid of laws on {-1, 1}
        for (int i = 0; i <= 100; ++i) {
            const double lam = i / 100.0;
            prob.p_family.push_back(
                Distribution::finite_scalar({-1.0, 1.0}, {1.0 - lam, lam}));
        }
        prob.model = Model::from_scalars({-1.0, 0.0, 1.0});
        prob.decision_set = ActionGrid{-1.0, 1.0, 201};
        const auto g = minimax_gap(prob, PredictorMixture::uniform(3), 1.0);
        CHECK(g.infsup - g.supinf >= -1e-12);
        CHECK(g.infsup - g.supinf <= 1e-3);
    }
}

TEST_CASE("uniqueness_probe: bernoulli anchors") {
    SUBCASE("p = 1/2: the other label is a witness") {
        const auto prob = bernoulli_single(0.5);
        const auto w = uniqueness_probe(prob, prob.p_family[0], 0.5, 1e-9);
        REQUIRE(w.has_value());
        CHECK(w->f == 1);  // f* = 0 by tie-break, witness is the other label
        CHECK(w->risk_gap == doctest::Approx(0.0));
        CHECK(w->variance == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("p = 3/4: no witness below the risk gap") {
        const auto prob = bernoulli_single(0.75);
        CHECK(!uniqueness_probe(prob, prob.p_family[0], 1e-6, 0.25).has_value());
    }
    SUBCASE("duplicated predictor has zero variance") {
        DecisionProblem prob = bernoulli_single(0.5);
        prob.model = Model::from_scalars({0.0, 0.0});
        prob.decision_set = prob.model;
        CHECK(!uniqueness_probe(prob, prob.p_family[0], 1e-6, 1.0).has_value());
    }
}

TEST_CASE("check_jrt2: shape guards and the log-loss table") {
    DecisionProblem prob;
    prob.loss = make_pmf_log();
    Model m;
    m.predictors = {{0.3, 0.7}, {0.6, 0.4}};
    prob.model = m;
    prob.decision_set = ConvexHullOfModel{};
    for (const auto& f : m.predictors)
        prob.p_family.push_back(Distribution::finite_scalar({0.0, 1.0}, {f[0], f[1]}));

    SUBCASE("gamma(f, f) != 1 is a shape violation") {
        CHECK_THROWS_AS(
            check_jrt2(prob, [](const Predictor&, const Predictor&) { return 0.9; }, 1.0),
            GammaShapeViolation);
    }
    SUBCASE("gamma == 1 holds when every pairwise moment is at most 1") {
        // single-predictor model: the only pair is (f, f) with moment 1
        DecisionProblem solo = prob;
        solo.model.predictors = {m.predictors[0]};
        solo.decision_set = solo.model;
        solo.p_family = {prob.p_family[0]};
        const auto rep =
            check_jrt2(solo, [](const Predictor&, const Predictor&) { return 1.0; }, 1.0);
        CHECK(rep.verdict == Verdict::Holds);
    }
    SUBCASE("log loss with the max-over-P ratio table") {
        // gamma(f, g) = max_P E_P[g(Z)/f(Z)], linear hence concave in g
        auto gamma = [&prob](const Predictor& f, const Predictor& g) {
            double worst = -kInf;
            for (const auto& P : prob.p_family) {
                const auto& fs = P.finite_support();
                double v = 0;
                for (size_t i = 0; i < fs.outcomes.size(); ++i) {
                    const auto k = static_cast<size_t>(fs.outcomes[i].y);
                    v += fs.probs[i] * g[k] / f[k];
                }
                worst = std::max(worst, v);
            }
            return worst;
        };
        const auto rep = check_jrt2(prob, gamma, 1.0);
        CHECK(rep.verdict == Verdict::Holds);
        // exp-concavity follows on the tested family (checked inside), and
        // directly as well:
        const auto ec = check_condition(prob, ConditionKind::StochExpConcave, 1.0, 0.0,
                                        SearchFamily{});
        CHECK(ec.verdict == Verdict::Holds);
    }
}

TEST_CASE("heavy tails: central refuted through a divergent moment") {
    auto recipe = heavy_tail_squared();
    const auto rep = check_condition(recipe.problem, ConditionKind::Central, 0.5, 0.0,
                                     SearchFamily{});
    CHECK(rep.verdict == Verdict::RefutedOnTestedFamily);
    CHECK(rep.infinite_moment);
    CHECK(max_eta(recipe.problem, ConditionKind::Central, 0.0, SearchFamily{}) == 0.0);
}

TEST_CASE("classical mixability is sampler-unsupported") {
    auto recipe = subgaussian_location(1.0, 1.0, 3);
    CHECK_THROWS_AS(
        check_condition(recipe.problem, ConditionKind::ClassicalMix, 1.0, 0.0, SearchFamily{}),
        UnsupportedKind);
}
