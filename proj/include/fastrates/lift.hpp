#pragma once

// Lifting an unconditional (action-space) problem to the conditional setting:
// outcomes become (x, y) pairs, predictors become per-x tuples of base
// actions, and the loss is applied pointwise in x. Substitution functions
// lift by acting on the x-marginals of the mixture.

#include <functional>
#include <vector>

#include "fastrates/learners.hpp"
#include "fastrates/problem.hpp"

namespace fastrates {

struct LiftedProblem {
    DecisionProblem problem;
    int x_count = 0;
    int base_dim = 1;            // parameter dimension of a base action
    Model base_model;
    Loss base_loss;

    // Marginal mixture over base predictors induced at covariate x.
    PredictorMixture marginal_at(const PredictorMixture& pi, int x) const;
};

// Tolerance on the total-variation membership pre-check of each conditional
// P(Y | X = x) against the unconditional family.
LiftedProblem lift_conditional(const DecisionProblem& unconditional, int x_count,
                               const std::vector<Distribution>& joint_family,
                               double membership_tol = 1e-9);

// Lift a substitution pointwise: psi'(Pi)(x) = psi(Pi_x).
Decision lift_substitution(const LiftedProblem& lifted, const Substitution& base,
                           const PredictorMixture& pi, double eta);

}  // namespace fastrates
