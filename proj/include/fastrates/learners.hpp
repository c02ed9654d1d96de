#pragma once

// Learning algorithms certified by the conditions: ERM, the Aggregating
// Algorithm with pluggable substitution functions, online-to-batch
// conversion, and the empirical rate-curve harness.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fastrates/problem.hpp"

namespace fastrates {

struct Sample {
    std::vector<Outcome> outcomes;
    uint64_t seed = 0;
    int dist_index = 0;
};

// Draw a reproducible n-sample from p_family[p_index]; the stream is keyed by
// (seed, p_index, rep) so parallel replication order is irrelevant.
Sample draw_sample(const DecisionProblem& problem, size_t p_index, int n, uint64_t seed,
                   uint64_t rep = 0);

// Empirical risk minimizer over the model, ties to lowest id.
size_t erm(const Sample& sample, const Model& model, const Loss& loss);

// A playable decision: either a raw parameter vector evaluated through the
// loss, or an opaque loss profile (e.g. a mixture forecast under log loss).
struct Decision {
    std::optional<Predictor> params;
    std::function<double(const Outcome&)> loss_profile;
    double loss(const Outcome& z) const { return loss_profile(z); }
};

enum class SubstitutionKind { Mean, LogLossMean, GridMinimax };

struct Substitution {
    SubstitutionKind kind = SubstitutionKind::Mean;
    int grid_resolution = 101;  // GridMinimax decision grid density

    Decision apply(const PredictorMixture& pi, const DecisionProblem& problem, double eta) const;
};

struct AARun {
    std::vector<PredictorMixture> weights;  // n+1 entries, prior first
    std::vector<Decision> decisions;        // prediction made each round
    std::vector<double> losses;             // loss of the played decision
    std::vector<double> mix_losses;         // m^eta_{Pi_{t-1}}(z_t)
    std::vector<double> expert_cumloss;     // final cumulative loss per expert
    double eta = 1.0;

    double cumulative_loss() const;
    double cumulative_mix_loss() const;
    // min_f [cumloss(f) + log(1/prior(f))/eta]; the exact telescoped value of
    // the total mix loss is <= this for any prior.
    double mix_loss_bound(const PredictorMixture& prior) const;
};

AARun aggregating_algorithm(const Sample& stream, const Model& model, const Loss& loss, double eta,
                            const Substitution& substitution, const PredictorMixture& prior,
                            const DecisionProblem& problem);

enum class OtbMode { AverageDecision, UniformRound };

struct BatchEstimator {
    // AverageDecision: a single decision; UniformRound: play a uniformly
    // random round's decision (risk averages over rounds).
    std::vector<Decision> decisions;
    OtbMode mode = OtbMode::UniformRound;

    ValueWithCi risk(const Distribution& P, const McPolicy& mc = {}) const;
};

BatchEstimator online_to_batch(const AARun& run, OtbMode mode, const Model& model);

// Empirical excess-risk curves. For each n: worst over the P family of the
// mean (over reps) excess risk of the trained predictor; slope is the
// least-squares fit of log(excess) on log(n) over the positive entries.
struct RateCurve {
    std::vector<int> ns;
    std::vector<double> excess;
    std::vector<double> stderr_excess;
    double slope = 0.0;
    std::pair<double, double> slope_ci{0.0, 0.0};
};

struct ErmLearner {};
struct AaOtbLearner {
    double eta = 1.0;
    Substitution substitution;
    OtbMode mode = OtbMode::UniformRound;
};
using LearnerSpec = std::variant<ErmLearner, AaOtbLearner>;

struct RateExperimentOptions {
    int threads = 1;
    McPolicy mc;
};

RateCurve rate_experiment(const DecisionProblem& problem, const LearnerSpec& learner,
                          const std::vector<int>& ns, int reps, uint64_t seed,
                          const RateExperimentOptions& opts = {});

}  // namespace fastrates
