#pragma once

// Numeric checkers for the fast-rate conditions, maximal-rate search,
// Bernstein conversions, the minimax-gap probe, and the uniqueness probe.
//
// Verdict semantics: refutation witnesses are exact on the tested family;
// "Holds" means "not refuted on the tested family". The search over mixtures
// uses vertices, two-point lambda-grids, and seeded Dirichlet draws; for the
// exponential-moment conditions the test quantity is linear in the mixture,
// so vertex testing alone is already complete on finite models.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastrates/problem.hpp"
#include "fastrates/vfunction.hpp"

namespace fastrates {

enum class ConditionKind {
    Central,
    PPC,
    Predictor,
    StochMix,
    StochExpConcave,
    ClassicalMix,
    JRT2,
};

std::string to_string(ConditionKind k);

struct SearchFamily {
    bool vertex_mixtures = true;
    int pair_grid = 8;          // lambda grid size for two-point mixtures
    int dirichlet_draws = 32;
    uint64_t seed = 1;
    int decision_grid = 33;     // resolution for "exists f" searches over hull/grid sets

    std::vector<double> lambda_grid() const;
};

enum class Verdict { Holds, RefutedOnTestedFamily, Inconclusive };

struct Witness {
    int p_index = -1;
    std::vector<double> pi;
    int f = -1;
};

struct ConditionReport {
    ConditionKind kind = ConditionKind::Central;
    double eta = 0.0;
    double eps = 0.0;
    Verdict verdict = Verdict::Holds;
    double worst_margin = -kInf;   // max over tested family of LHS - RHS, native scale
    Witness witness;
    std::optional<double> mc_ci;
    bool infinite_moment = false;  // divergent exponential moment counted as refutation
};

struct CheckOptions {
    double tolerance = 1e-9;  // exact-margin refutation threshold
    McPolicy mc;
};

ConditionReport check_condition(const DecisionProblem& problem, ConditionKind kind, double eta,
                                double eps, const SearchFamily& search,
                                const CheckOptions& opts = {});

// Largest eta (within tol) at which check_condition holds on the search
// family; 0 when refuted for every tested eta. Monotone in eta, so bisection
// between a geometrically grown bracket is valid. The cap stands in for
// "mixable at every rate".
struct MaxEtaOptions {
    double tol = 1e-6;
    double eta_cap = 1e6;
    double margin_tolerance = 1e-13;  // sharper than the default report tolerance
};
double max_eta(const DecisionProblem& problem, ConditionKind kind, double eps,
               const SearchFamily& search, const MaxEtaOptions& opts = {});

// Bernstein condition checks. Moment forms: SecondMoment is the classical
// (beta, B) form E[W^2] <= u(E[W]); Variance replaces the second moment with
// the variance. The classical form is the default (it is the form whose
// failure on unbounded losses the refutation witnesses certify).
enum class BernsteinForm { SecondMoment, Variance };

ConditionReport check_bernstein(const DecisionProblem& problem, const VFunction& u,
                                BernsteinForm form = BernsteinForm::SecondMoment,
                                const CheckOptions& opts = {});

// Conversions between the Bernstein side and the rate-function side.
// bernstein_to_v: v(x) = (x / (u(x) kappa(2 b a))) ^ b     (losses in [0, a])
// v_to_bernstein: u(x) = 6 x / (v(x) kappa(-2 b a)), b = sup v on [0, a].
VFunction bernstein_to_v(const VFunction& u, double loss_range_a, double cap_b);
VFunction v_to_bernstein(const VFunction& v, double loss_range_a);

// sup_P inf_f and inf_f sup_P of S^eta_Pi(P, f) = E_P E_{g~Pi} e^{eta(l_f - l_g)}
// over the problem's P grid and decision candidates.
struct MinimaxGap {
    double supinf = 0.0;
    double infsup = 0.0;
};
MinimaxGap minimax_gap(const DecisionProblem& problem, const PredictorMixture& pi, double eta,
                       const SearchFamily& search = {}, const CheckOptions& opts = {});

// Near-optimal predictor with non-vanishing loss variance, if one exists:
// f != f* with risk gap <= delta and Var(l_f - l_{f*}) >= eps.
struct UniquenessWitness {
    size_t f = 0;
    double risk_gap = 0.0;
    double variance = 0.0;
};
std::optional<UniquenessWitness> uniqueness_probe(const DecisionProblem& problem,
                                                  const Distribution& P, double eps, double delta,
                                                  const McPolicy& mc = {});

// Pairwise exponential-moment check E[e^{eta(l_f - l_g)}] <= gamma(f, g) with
// gamma(f, f) = 1 and gamma(f, .) concave (midpoint-tested on the embedding).
// On success also verifies stochastic exp-concavity on the tested family.
using GammaFn = std::function<double(const Predictor&, const Predictor&)>;
ConditionReport check_jrt2(const DecisionProblem& problem, const GammaFn& gamma, double eta,
                           const SearchFamily& search = {}, const CheckOptions& opts = {});

// Decision candidates realized from the problem's decision set (vertices of
// the model, a parameter grid over the hull, or an action grid).
std::vector<Predictor> decision_candidates(const DecisionProblem& problem,
                                           const SearchFamily& search);

// Mixture test family for a problem (vertices + two-point lambda grid rooted
// at `root` + Dirichlet draws). root < 0 uses all ordered pairs.
std::vector<PredictorMixture> mixture_family(size_t n_predictors, const SearchFamily& search,
                                             int root = -1);

}  // namespace fastrates
