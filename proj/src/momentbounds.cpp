#include "fastrates/momentbounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fastrates/errors.hpp"

namespace fastrates {

namespace {
// Largest multiplier proved for the half-rate CGF bound; 0.21 <= (sqrt(e)-1)^2/2.
constexpr double kCgfRate = 0.21;
}  // namespace

double kappa(double x) {
    if (std::abs(x) > 1e-4) return (std::exp(x) - x - 1.0) / (x * x);
    // 1/2 + x/6 + x^2/24 + x^3/120; branches agree to ~1e-12 at the switch.
    return 0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0;
}

MomentTaylorGap moment_taylor_gap(const std::vector<double>& values,
                                  const std::vector<double>& probs, double a) {
    if (values.size() != probs.size() || values.empty())
        throw Error("moment_taylor_gap: size mismatch");
    double mean = 0.0, m2 = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i]) > a * (1 + 1e-12))
            throw ShapeViolation("moment_taylor_gap: support exceeds [-a, a]");
        mean += probs[i] * values[i];
        m2 += probs[i] * values[i] * values[i];
    }
    const double var = std::max(0.0, m2 - mean * mean);
    // log E[e^{-X}] via LSE around the max of -values for stability.
    double mx = -kInf;
    for (double v : values) mx = std::max(mx, -v);
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) s += probs[i] * std::exp(-values[i] - mx);
    MomentTaylorGap out;
    out.gap = mean + mx + std::log(s);
    out.lower = kappa(-2 * a) * var;
    out.upper = kappa(2 * a) * var;
    return out;
}

double cramer_chernoff(const DecisionProblem& problem, size_t p_index, size_t f, size_t fstar,
                       double eta, double t, int n, const McPolicy& mc) {
    if (!(eta > 0)) throw PreconditionViolated("cramer_chernoff: eta must be > 0");
    const auto ms = excess_loss_moments(problem.p_family[p_index], problem.model[f],
                                        problem.model[fstar], problem.loss, mc);
    const double m = ms.mgf(-eta);  // E[e^{-eta W}]
    if (m == kInf) throw InfiniteMoment("cramer_chernoff: CGF diverges");
    const double lambda = std::log(m);
    return std::exp(eta * n * t + n * lambda);
}

Feasibility feasible_moment(double eta_star, double a_over_n) {
    if (!(eta_star > 0) || !(a_over_n > 0))
        throw PreconditionViolated("feasible_moment: eta* and a/n must be > 0");
    const double threshold = std::tanh(eta_star / 2.0);
    if (a_over_n < threshold - 1e-12) return Feasibility::Interior;
    if (a_over_n <= threshold + 1e-12) return Feasibility::Boundary;
    return Feasibility::Infeasible;
}

double cgf_half_eta_bound(double eta_star, double a_over_n, double v_range) {
    const double eta_c = v_range * eta_star;       // canonical rate after scaling to [-1, 1]
    const double a_c = a_over_n / v_range;         // canonical mean
    if (feasible_moment(eta_c, a_c) == Feasibility::Infeasible)
        throw InfeasibleInstance("cgf_half_eta_bound: no such excess-loss variable exists");
    return -kCgfRate * std::min(eta_c, 1.0) * a_c;
}

// ---------------------------------------------------------------------------
// Moment LP oracle: maximize sum_j w_j e^{(eta/2) s_j} subject to
//   sum w_j = 1, sum w_j s_j = -a/n, sum w_j e^{eta s_j} = 1, w >= 0
// on a uniform grid of [-1, 1] (after canonical rescaling). A 3-row dense
// simplex with Bland's rule; optimal bases are the <=3-atom supports.
namespace {

struct SimplexLp {
    // max c'w s.t. A w = b (3 rows), w >= 0.
    int ncols = 0;
    std::vector<std::array<double, 3>> cols;
    std::vector<double> obj;
    std::array<double, 3> rhs{};

    // Returns optimal value, or throws NoFeasibleAtomTriple / Error.
    double solve() const {
        const int m = 3;
        // Phase 1: artificial basis.
        std::array<int, 3> basis{};
        std::array<std::array<double, 3>, 3> binv{};  // inverse of basis matrix
        std::array<double, 3> xb{};
        std::array<double, 3> b = rhs;
        std::array<double, 3> art_sign{};
        for (int i = 0; i < m; ++i) {
            art_sign[i] = b[i] >= 0 ? 1.0 : -1.0;
            basis[i] = ncols + i;  // artificial i
            for (int j = 0; j < m; ++j) binv[i][j] = 0.0;
            binv[i][i] = art_sign[i];
            xb[i] = std::abs(b[i]);
        }
        auto col_of = [&](int j, std::array<double, 3>& out) {
            if (j < ncols) {
                out = cols[j];
            } else {
                out = {0, 0, 0};
                out[j - ncols] = art_sign[j - ncols];
            }
        };
        auto price = [&](const std::array<double, 3>& y, int j) {
            std::array<double, 3> aj{};
            col_of(j, aj);
            return y[0] * aj[0] + y[1] * aj[1] + y[2] * aj[2];
        };
        auto iterate = [&](auto cost, int max_iter) -> bool {
            for (int it = 0; it < max_iter; ++it) {
                // y' = c_B' B^{-1}
                std::array<double, 3> cb{};
                for (int i = 0; i < m; ++i) cb[i] = cost(basis[i]);
                std::array<double, 3> y{};
                for (int j = 0; j < m; ++j)
                    y[j] = cb[0] * binv[0][j] + cb[1] * binv[1][j] + cb[2] * binv[2][j];
                // entering column: smallest index with positive reduced cost (maximization)
                int enter = -1;
                for (int j = 0; j < ncols + m; ++j) {
                    bool in_basis = (j == basis[0] || j == basis[1] || j == basis[2]);
                    if (in_basis) continue;
                    const double rc = cost(j) - price(y, j);
                    if (rc > 1e-11) { enter = j; break; }
                }
                if (enter < 0) return true;  // optimal
                std::array<double, 3> aj{};
                col_of(enter, aj);
                std::array<double, 3> d{};
                for (int i = 0; i < m; ++i)
                    d[i] = binv[i][0] * aj[0] + binv[i][1] * aj[1] + binv[i][2] * aj[2];
                // ratio test, Bland: smallest basis index among ties
                int leave = -1;
                double best = kInf;
                for (int i = 0; i < m; ++i) {
                    if (d[i] > 1e-12) {
                        const double r = xb[i] / d[i];
                        if (r < best - 1e-15 ||
                            (r < best + 1e-15 && (leave < 0 || basis[i] < basis[leave]))) {
                            best = r;
                            leave = i;
                        }
                    }
                }
                if (leave < 0) throw Error("moment LP: unbounded (should not happen)");
                // pivot
                const double piv = d[leave];
                for (int j = 0; j < m; ++j) binv[leave][j] /= piv;
                xb[leave] = best;
                for (int i = 0; i < m; ++i) {
                    if (i == leave) continue;
                    const double f = d[i];
                    if (f == 0.0) continue;
                    for (int j = 0; j < m; ++j) binv[i][j] -= f * binv[leave][j];
                    xb[i] -= f * best;
                    if (xb[i] < 0 && xb[i] > -1e-12) xb[i] = 0;
                }
                basis[leave] = enter;
            }
            return false;
        };

        // Phase 1: maximize -(sum of artificials).
        auto phase1_cost = [&](int j) { return j >= ncols ? -1.0 : 0.0; };
        if (!iterate(phase1_cost, 20000)) throw Error("moment LP: phase 1 iteration limit");
        double art_total = 0.0;
        for (int i = 0; i < m; ++i)
            if (basis[i] >= ncols) art_total += xb[i];
        if (art_total > 1e-9)
            throw NoFeasibleAtomTriple("moment LP: no feasible grid support (grid too coarse?)");

        // Phase 2: real objective; artificials priced at -inf effectively.
        auto phase2_cost = [&](int j) { return j >= ncols ? -1e30 : obj[j]; };
        if (!iterate(phase2_cost, 20000)) throw Error("moment LP: phase 2 iteration limit");
        double val = 0.0;
        for (int i = 0; i < m; ++i)
            if (basis[i] < ncols) val += obj[basis[i]] * xb[i];
        return val;
    }
};

}  // namespace

double moment_lp_oracle(const MomentProblemInstance& inst, int grid_size) {
    if (grid_size < 100) throw PreconditionViolated("moment_lp_oracle: grid_size >= 100");
    const double eta = inst.range_v * inst.eta_star;
    const double a = inst.a_over_n / inst.range_v;
    const auto feas = feasible_moment(eta, a);
    if (feas == Feasibility::Infeasible)
        throw InfeasibleInstance("moment_lp_oracle: infeasible instance");

    SimplexLp lp;
    lp.ncols = grid_size;
    lp.cols.resize(grid_size);
    lp.obj.resize(grid_size);
    for (int j = 0; j < grid_size; ++j) {
        const double s = -1.0 + 2.0 * j / (grid_size - 1);
        lp.cols[j] = {1.0, s, std::exp(eta * s)};
        lp.obj[j] = std::exp(eta / 2.0 * s);
    }
    lp.rhs = {1.0, -a, 1.0};
    return lp.solve();
}

// ---------------------------------------------------------------------------

double DualCertificate::constraint_u(double s) const {
    return 1.0 + c2 * std::expm1(eta * s) - std::exp(eta / 2.0 * s) + eta * (0.5 - c2) * s;
}

double DualCertificate::dual_value(double a_over_n) const {
    return d0 - a_over_n * d1 + d2;
}

DualCertificate dual_certificate_for(double eta) {
    if (!(eta > 0)) throw PreconditionViolated("dual_certificate_for: eta must be > 0");
    const double sq = std::sqrt(std::exp(1.0));
    const double c2 = eta <= 1.0 ? sq - std::exp(1.0) / 2.0
                                 : 0.5 - 0.5 * (sq - 1.0) * (sq - 1.0) / eta;
    DualCertificate d;
    d.eta = eta;
    d.c2 = c2;
    d.d2 = -c2;
    d.d0 = -d.d2 - 1.0;
    d.d1 = -eta * (0.5 - c2);
    for (int i = 0; i <= 10000; ++i) {
        const double s = -1.0 + 2.0 * i / 10000.0;
        if (d.constraint_u(s) < -1e-9)
            throw CertificateInvalid("dual certificate failed grid check (implementation bug)");
    }
    return d;
}

double finite_class_bound(const RateBoundInputs& in) {
    if (in.n_class < 1 || !(in.delta > 0) || !(in.delta < 1) || in.n < 1)
        throw PreconditionViolated("finite_class_bound: need N >= 1, delta in (0,1), n >= 1");
    return 5.0 * std::max(in.v_range, 1.0 / in.eta_star) *
           (std::log(1.0 / in.delta) + std::log(in.n_class)) / in.n;
}

std::optional<double> intermediate_rate_bound(const VFunction& v, double n_class, double delta,
                                              double n, double c, double v_range) {
    const double q = 5.0 * (std::log(1.0 / delta) + std::log(n_class)) / (c * n);
    // w = inverse of x -> x v(x), found by bisection (the map is increasing).
    auto xv = [&](double x) { return x * v(x); };
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (xv(hi) < q && guard++ < 200) hi *= 2.0;
    if (xv(hi) < q) return std::nullopt;  // v too flat to reach q
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (xv(mid) < q ? lo : hi) = mid;
    }
    const double rate = 0.5 * (lo + hi);
    // Applicability gate: the learning rate at the achieved precision must fit
    // the bounded-loss budget (v(rate) <= 1/(cV), as the bound's derivation requires).
    if (v(rate) > 1.0 / (c * v_range) + 1e-12) return std::nullopt;
    return rate;
}

double vc_type_bound(const RateBoundInputs& in) {
    if (!(in.n >= 5) || !(in.delta <= 0.5) || !(in.v_range >= 1) || !in.covering_k ||
        !in.covering_c || !(*in.covering_k >= 1))
        throw PreconditionViolated("vc_type_bound: need n >= 5, delta <= 1/2, V >= 1, K >= 1");
    const double K = *in.covering_k, C = *in.covering_c;
    const double V = in.v_range, eta = in.eta_star, n = in.n, delta = in.delta;
    const double branch1 =
        8.0 * std::max(V, 1.0 / eta) * (C * std::log(K * n) + std::log(2.0 / delta));
    const double branch2 =
        2.0 * V *
        (1080.0 * C * std::log(2.0 * K * n) +
         90.0 * std::sqrt(std::log(2.0 / delta) * C * std::log(2.0 * K * n)) +
         std::log(2.0 * std::exp(1.0) / delta));
    return std::max(branch1, branch2) / n + 1.0 / n;
}

std::pair<double, double> optimize_eta_rate(const std::function<double(double)>& eps_of_eta,
                                            double n_class, double n) {
    auto total = [&](double eta) { return std::log(n_class) / (eta * n) + eps_of_eta(eta); };
    // Coarse log grid, then golden-section refinement around the best point.
    double best_eta = 1.0, best_val = kInf;
    for (int i = 0; i <= 280; ++i) {
        const double eta = std::pow(10.0, -8.0 + 14.0 * i / 280.0);
        const double v = total(eta);
        if (v < best_val) { best_val = v; best_eta = eta; }
    }
    double lo = best_eta / std::pow(10.0, 14.0 / 280.0);
    double hi = best_eta * std::pow(10.0, 14.0 / 280.0);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = total(x1), f2 = total(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = total(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = total(x2);
        }
    }
    const double eta = 0.5 * (lo + hi);
    return {eta, total(eta)};
}

}  // namespace fastrates
