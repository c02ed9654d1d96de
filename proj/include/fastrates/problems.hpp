#pragma once

// Worked-example constructors, each carrying certified expected facts used by
// the integration tests (maximal rates, Bernstein coefficients, closed-form
// excess risks).

#include <map>
#include <string>

#include "fastrates/problem.hpp"

namespace fastrates {

struct ProblemRecipe {
    std::string name;
    std::map<std::string, double> params;
    DecisionProblem problem;
    std::map<std::string, double> expected;
};

// 0/1 loss on {0,1} with P a margin-separated Bernoulli grid: the family
// holds every grid p with |p - 1/2| >= delta, built as a geometric margin
// ladder so the curve is probed at every scale. For delta = 0 the ladder
// includes p = 1/2 itself.
ProblemRecipe bernoulli_01(double delta, int grid);

// Largest eta with p e^{-eta} + (1-p) e^{eta} <= 1 (p > 1/2): log(p/(1-p)).
double bernoulli_eta_max(double p);

// Squared loss 0.5 (z-f)^2 on grids inside [-B, B]; classically mixable at
// 1/B^2, exp-concave at 1/(4B^2).
ProblemRecipe bounded_squared(double B, int z_grid, int f_grid);

// Squared loss against subgaussian laws with proxy variance sigma2; the
// admissible rate is at least 1/sigma2. mean_range bounds the predictor grid.
ProblemRecipe subgaussian_location(double sigma2, double mean_range, int f_grid);

// Log loss of unit-variance normal densities over a location grid.
ProblemRecipe normal_location_logloss(const std::vector<double>& nu_grid,
                                      const std::vector<double>& mu_grid);

// Squared loss with a heavy-tailed (Student t5) center: every exponential
// moment diverges, yet the linear-coefficient Bernstein bound holds.
ProblemRecipe heavy_tail_squared();

// Brier score on num_outcomes with a probability-vector forecast grid.
ProblemRecipe brier(int num_outcomes, int forecast_grid = 11);

// Recipe lookup by CLI name: bernoulli01, sqbounded, subgauss, normloc,
// heavytail, brier. Throws ConfigError for unknown names.
ProblemRecipe recipe_by_name(const std::string& name,
                             const std::map<std::string, double>& params);

}  // namespace fastrates
