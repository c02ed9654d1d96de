#pragma once

// Decision problems and the basic quantities built on them: risk, best
// predictor, mix loss, and excess-loss moment summaries.

#include <functional>
#include <optional>
#include <vector>

#include "fastrates/distribution.hpp"
#include "fastrates/loss.hpp"
#include "fastrates/model.hpp"
#include "fastrates/numeric.hpp"

namespace fastrates {

// Monte Carlo policy for sampler-based expectations. Draws are addressed by
// (seed, index) sub-streams so results do not depend on evaluation order.
struct McPolicy {
    uint64_t seed = 1;
    int n = 100000;
};

struct DecisionProblem {
    Loss loss;
    std::vector<Distribution> p_family;
    Model model;
    DecisionSet decision_set;

    // Construction check: every P admits at least one finite-risk predictor.
    void validate(const McPolicy& mc = {}) const;
};

struct ValueWithCi {
    double value = 0.0;
    double ci_halfwidth = 0.0;  // 0 when exact
    bool exact = true;
};

// E_{Z~P}[l_f(Z)]; exact on finite support or through the moment oracle,
// Monte Carlo (with recorded 95% CI) otherwise.
ValueWithCi risk_ci(const Distribution& P, const Predictor& f, const Loss& loss,
                    const McPolicy& mc = {});
double risk(const Distribution& P, const Predictor& f, const Loss& loss,
            const McPolicy& mc = {});

// Risk of an arbitrary loss profile z -> loss (used for played decisions that
// are not model elements, e.g. mixture forecasts). Exact on finite support.
ValueWithCi risk_profile_ci(const Distribution& P, const std::function<double(const Outcome&)>& lf,
                            const McPolicy& mc = {});

// argmin over the model, ties to lowest id; throws AllInfiniteRisk.
std::pair<size_t, double> best_predictor(const Distribution& P, const Model& model,
                                         const Loss& loss, const McPolicy& mc = {});

// Mix loss m^eta_Pi(z) = -(1/eta) log sum_f Pi(f) e^{-eta l_f(z)}, stabilized.
double mix_loss(const PredictorMixture& pi, const Outcome& z, double eta, const Loss& loss,
                const Model& model);

// E_{Z~P}[m^eta_Pi(Z)].
ValueWithCi expected_mix_loss(const Distribution& P, const PredictorMixture& pi, double eta,
                              const Loss& loss, const Model& model, const McPolicy& mc = {});

// Moment summary of the excess loss W = l_f - l_fstar under P. `mgf` is
// t -> E[e^{t W}] (so the CGF of -W at eta is log mgf(-eta)), exact on finite
// support or through an affine-excess oracle; +inf where divergent.
struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    double second_moment = 0.0;
    std::function<double(double)> mgf;
    double ci_halfwidth = 0.0;
    bool exact = true;
};

MomentSummary excess_loss_moments(const Distribution& P, const Predictor& f,
                                  const Predictor& fstar, const Loss& loss,
                                  const McPolicy& mc = {});

}  // namespace fastrates
