#pragma once

// Moment-problem machinery behind the fast-rate bounds: the kappa function,
// the CGF-vs-variance sandwich, Cramer-Chernoff, the two-moment semi-infinite
// LP and its closed-form bound with dual certificates, and the rate bound
// formulas for finite and VC-type classes.

#include <functional>
#include <optional>
#include <utility>

#include "fastrates/problem.hpp"
#include "fastrates/vfunction.hpp"

namespace fastrates {

// kappa(x) = (e^x - x - 1) / x^2, continuous at 0 with kappa(0) = 1/2;
// strictly positive and increasing. Series branch near 0 avoids cancellation.
double kappa(double x);

// For finite-support X in [-a, a]: gap = E[X] + log E[e^{-X}] together with
// the sandwich kappa(-2a) Var(X) <= gap <= kappa(2a) Var(X).
struct MomentTaylorGap {
    double gap = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};
MomentTaylorGap moment_taylor_gap(const std::vector<double>& values,
                                  const std::vector<double>& probs, double a);

// exp(eta n t + n Lambda_{-W_f}(eta)): bound on Pr(P_n l_f <= P_n l_{f*} + t).
double cramer_chernoff(const DecisionProblem& problem, size_t p_index, size_t f, size_t fstar,
                       double eta, double t, int n, const McPolicy& mc = {});

enum class Feasibility { Interior, Boundary, Infeasible };

// Compares a/n to tanh(eta*/2) = (cosh eta* - 1)/sinh eta*.
Feasibility feasible_moment(double eta_star, double a_over_n);

// Upper bound on Lambda_{-W}(eta*/2) for any W on [-V, V] with E[W] = a/n and
// Lambda_{-W}(eta*) = 0:  -0.21 (V eta* ^ 1) (a/V)/n. Throws InfeasibleInstance.
double cgf_half_eta_bound(double eta_star, double a_over_n, double v_range = 1.0);

struct MomentProblemInstance {
    double eta_star = 1.0;
    double a_over_n = 0.1;
    double range_v = 1.0;
};

// Maximum of E[e^{(eta*/2) S}] over grid-supported laws on [-V, V] with
// E[S] = -a/n and E[e^{eta* S}] = 1. Solved as a 3-row LP over the grid
// columns (optimal bases are <=3-atom supports); exact up to grid resolution.
double moment_lp_oracle(const MomentProblemInstance& inst, int grid_size);

// Feasible dual triple for the moment problem at rate eta, built from the
// two-regime constant c2 (= sqrt(e) - e/2 for eta <= 1, 1/2 - (sqrt(e)-1)^2/(2 eta)
// otherwise). The constraint function u(s) is verified >= 0 on a grid of
// [-1, 1] at construction.
struct DualCertificate {
    double d0 = 0.0, d1 = 0.0, d2 = 0.0;
    double eta = 1.0;
    double c2 = 0.0;

    double constraint_u(double s) const;           // 1 + c2(e^{eta s}-1) - e^{(eta/2)s} + eta(1/2-c2)s
    double dual_value(double a_over_n) const;      // d0 - (a/n) d1 + d2
};
DualCertificate dual_certificate_for(double eta);

struct RateBoundInputs {
    double v_range = 1.0;   // V
    double eta_star = 1.0;
    double n_class = 1.0;   // N = |F|
    double delta = 0.05;
    double n = 1.0;
    std::optional<VFunction> v;
    double c = 1.0;                     // constant in the intermediate-rate gate
    std::optional<double> covering_k;   // K
    std::optional<double> covering_c;   // C
};

// 5 max(V, 1/eta*) (log(1/delta) + log N) / n.
double finite_class_bound(const RateBoundInputs& in);

// w(5(log(1/delta) + log N)/(c n)) with w the inverse of x -> x v(x),
// returned only when v(rate) <= 1/(c V); nullopt otherwise.
std::optional<double> intermediate_rate_bound(const VFunction& v, double n_class, double delta,
                                              double n, double c, double v_range);

// The two-branch VC-type expression plus 1/n, evaluated as printed.
double vc_type_bound(const RateBoundInputs& in);

// Minimize log(N)/(eta n) + eps(eta) over a log grid refined by golden section.
std::pair<double, double> optimize_eta_rate(const std::function<double(double)>& eps_of_eta,
                                            double n_class, double n);

}  // namespace fastrates
