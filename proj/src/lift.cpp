#include "fastrates/lift.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fastrates/errors.hpp"

namespace fastrates {

namespace {

// Loss on (x, y) pairs that dispatches to the base loss on the x-th block of
// the tuple predictor's parameters.
class LiftedLoss final : public LossBase {
public:
    LiftedLoss(Loss base, int x_count, int base_dim)
        : base_(std::move(base)), x_count_(x_count), dim_(base_dim) {}

    std::string name() const override { return "lifted_" + base_->name(); }
    double evaluate(const Predictor& f, const Outcome& z) const override {
        if (z.x < 0 || z.x >= x_count_) throw Error("lifted loss: outcome has no valid covariate");
        Predictor block(f.begin() + z.x * dim_, f.begin() + (z.x + 1) * dim_);
        return base_->evaluate(block, Outcome{z.y, -1});
    }
    std::optional<std::pair<double, double>> declared_range() const override {
        return base_->declared_range();
    }

private:
    Loss base_;
    int x_count_;
    int dim_;
};

std::map<double, double> conditional_of(const FiniteSupport& joint, int x, double& px) {
    std::map<double, double> cond;
    px = 0;
    for (size_t i = 0; i < joint.outcomes.size(); ++i) {
        if (joint.outcomes[i].x != x) continue;
        px += joint.probs[i];
        cond[joint.outcomes[i].y] += joint.probs[i];
    }
    for (auto& [y, p] : cond) p /= px;
    return cond;
}

double tv_distance(const std::map<double, double>& a, const FiniteSupport& b) {
    std::map<double, double> bm;
    for (size_t i = 0; i < b.outcomes.size(); ++i) bm[b.outcomes[i].y] += b.probs[i];
    double tv = 0;
    for (const auto& [y, p] : a) {
        const auto it = bm.find(y);
        tv += std::abs(p - (it == bm.end() ? 0.0 : it->second));
    }
    for (const auto& [y, p] : bm)
        if (!a.count(y)) tv += p;
    return 0.5 * tv;
}

}  // namespace

PredictorMixture LiftedProblem::marginal_at(const PredictorMixture& pi, int x) const {
    // Tuple t maps x to base id t_x; enumerate tuples in mixed-radix order.
    const size_t nb = base_model.size();
    std::vector<double> w(nb, 0.0);
    for (size_t t = 0; t < pi.w.size(); ++t) {
        size_t rem = t;
        for (int k = 0; k < x; ++k) rem /= nb;
        w[rem % nb] += pi.w[t];
    }
    return PredictorMixture{std::move(w)};
}

LiftedProblem lift_conditional(const DecisionProblem& unconditional, int x_count,
                               const std::vector<Distribution>& joint_family,
                               double membership_tol) {
    if (x_count < 1) throw PreconditionViolated("lift_conditional: x_count >= 1");
    const size_t nb = unconditional.model.size();
    double tuples = std::pow(static_cast<double>(nb), x_count);
    if (tuples > 65536.0) throw PreconditionViolated("lift_conditional: tuple model too large");

    // Membership pre-check: each conditional must match some finite-support
    // family member within tolerance (samplers are skipped).
    for (const auto& J : joint_family) {
        if (!J.is_finite_support())
            throw UnsupportedKind("lift_conditional: joint laws must have finite support");
        for (int x = 0; x < x_count; ++x) {
            double px = 0;
            const auto cond = conditional_of(J.finite_support(), x, px);
            if (px == 0) continue;  // x never occurs under this joint law
            bool found = false;
            for (const auto& P : unconditional.p_family) {
                if (!P.is_finite_support()) continue;
                if (tv_distance(cond, P.finite_support()) <= membership_tol) {
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ConditionalNotInFamily("conditional law at x=" + std::to_string(x) +
                                             " is outside the unconditional family");
        }
    }

    LiftedProblem out;
    out.x_count = x_count;
    out.base_model = unconditional.model;
    out.base_loss = unconditional.loss;
    out.base_dim = static_cast<int>(unconditional.model[0].size());
    out.problem.loss = std::make_shared<LiftedLoss>(unconditional.loss, x_count, out.base_dim);
    out.problem.p_family = joint_family;

    Model lifted;
    lifted.embedded = unconditional.model.embedded;
    const auto n_tuples = static_cast<size_t>(tuples);
    for (size_t t = 0; t < n_tuples; ++t) {
        Predictor p;
        p.reserve(static_cast<size_t>(x_count) * out.base_dim);
        size_t rem = t;
        for (int x = 0; x < x_count; ++x) {
            const auto& blk = unconditional.model[rem % nb];
            p.insert(p.end(), blk.begin(), blk.end());
            rem /= nb;
        }
        lifted.predictors.push_back(std::move(p));
    }
    out.problem.model = std::move(lifted);
    out.problem.decision_set =
        std::holds_alternative<Model>(unconditional.decision_set)
            ? DecisionSet{out.problem.model}
            : DecisionSet{ConvexHullOfModel{}};
    out.problem.validate();
    return out;
}

Decision lift_substitution(const LiftedProblem& lifted, const Substitution& base,
                           const PredictorMixture& pi, double eta) {
    // Build a per-x decision from each marginal mixture.
    DecisionProblem base_problem;
    base_problem.loss = lifted.base_loss;
    base_problem.model = lifted.base_model;
    base_problem.decision_set = ConvexHullOfModel{};
    // Conditional supports per x feed grid-minimax substitutions.
    for (const auto& J : lifted.problem.p_family) {
        const auto& fs = J.finite_support();
        std::map<double, double> marg;
        for (size_t i = 0; i < fs.outcomes.size(); ++i) marg[fs.outcomes[i].y] += fs.probs[i];
        std::vector<double> ys;
        std::vector<double> ps;
        for (const auto& [y, p] : marg) { ys.push_back(y); ps.push_back(p); }
        base_problem.p_family.push_back(Distribution::finite_scalar(ys, std::move(ps)));
    }
    std::vector<Decision> per_x;
    per_x.reserve(lifted.x_count);
    for (int x = 0; x < lifted.x_count; ++x)
        per_x.push_back(base.apply(lifted.marginal_at(pi, x), base_problem, eta));

    Decision d;
    bool all_params = true;
    for (const auto& dx : per_x) all_params = all_params && dx.params.has_value();
    if (all_params) {
        Predictor concat;
        for (const auto& dx : per_x) concat.insert(concat.end(), dx.params->begin(), dx.params->end());
        d.params = std::move(concat);
    }
    d.loss_profile = [per_x](const Outcome& z) {
        return per_x.at(static_cast<size_t>(z.x)).loss(Outcome{z.y, -1});
    };
    return d;
}

}  // namespace fastrates
