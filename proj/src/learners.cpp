#include "fastrates/learners.hpp"

#include <algorithm>
#include <cmath>

#include "fastrates/errors.hpp"
#include "fastrates/numeric.hpp"
#include "fastrates/parallel.hpp"
#include "fastrates/rng.hpp"

namespace fastrates {

Sample draw_sample(const DecisionProblem& problem, size_t p_index, int n, uint64_t seed,
                   uint64_t rep) {
    const auto& P = problem.p_family[p_index];
    Sample s;
    s.seed = seed;
    s.dist_index = static_cast<int>(p_index);
    s.outcomes.reserve(n);
    if (P.is_finite_support()) {
        const auto& fs = P.finite_support();
        std::vector<double> cum(fs.probs.size());
        double acc = 0;
        for (size_t i = 0; i < fs.probs.size(); ++i) { acc += fs.probs[i]; cum[i] = acc; }
        Stream st(seed, p_index, rep);
        for (int i = 0; i < n; ++i) {
            const double u = st.uniform01();
            const size_t k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
            s.outcomes.push_back(fs.outcomes[std::min(k, fs.outcomes.size() - 1)]);
        }
    } else {
        const auto& sp = P.sampler();
        const uint64_t stream_seed = mix_stream(seed, p_index, rep);
        for (int i = 0; i < n; ++i)
            s.outcomes.push_back(sp.draw(stream_seed, static_cast<uint64_t>(i)));
    }
    return s;
}

size_t erm(const Sample& sample, const Model& model, const Loss& loss) {
    if (sample.outcomes.empty() || model.size() == 0)
        throw PreconditionViolated("erm: nonempty sample and model required");
    size_t best = 0;
    double best_risk = kInf;
    for (size_t f = 0; f < model.size(); ++f) {
        double r = 0.0;
        for (const auto& z : sample.outcomes) {
            const double l = loss->evaluate(model[f], z);
            if (l == kInf) { r = kInf; break; }
            r += l;
        }
        if (r < best_risk) { best_risk = r; best = f; }
    }
    if (best_risk == kInf) throw AllInfiniteEmpiricalRisk("every predictor has infinite empirical risk");
    return best;
}

Decision Substitution::apply(const PredictorMixture& pi, const DecisionProblem& problem,
                             double eta) const {
    const Model& model = problem.model;
    const Loss& loss = problem.loss;
    switch (kind) {
        case SubstitutionKind::Mean: {
            Predictor m = pi.mean(model);
            if (const auto* ms = std::get_if<Model>(&problem.decision_set)) {
                bool inside = false;
                for (const auto& p : ms->predictors) {
                    double d = 0;
                    for (size_t k = 0; k < p.size(); ++k) d += std::abs(p[k] - m[k]);
                    if (d <= 1e-12) { inside = true; break; }
                }
                if (!inside)
                    throw SubstitutionOutsideDecisionSet(
                        "mean substitution leaves a model-only decision set");
            }
            Decision d;
            d.params = m;
            d.loss_profile = [m, loss](const Outcome& z) { return loss->evaluate(m, z); };
            return d;
        }
        case SubstitutionKind::LogLossMean: {
            // Mixture forecast: under log loss its loss equals the eta=1 mix loss.
            auto w = pi;
            Decision d;
            d.loss_profile = [w, loss, &model](const Outcome& z) {
                return mix_loss(w, z, 1.0, loss, model);
            };
            return d;
        }
        case SubstitutionKind::GridMinimax: {
            // Pick the decision minimizing sup_z [l_f(z) - m^eta_Pi(z)] over a
            // finite outcome space.
            std::vector<Outcome> zs;
            for (const auto& P : problem.p_family) {
                if (!P.is_finite_support())
                    throw UnsupportedKind("grid-minimax substitution needs finite outcomes");
                for (const auto& z : P.finite_support().outcomes) {
                    bool seen = false;
                    for (const auto& v : zs)
                        if (v == z) { seen = true; break; }
                    if (!seen) zs.push_back(z);
                }
            }
            std::vector<Predictor> cands = model.predictors;
            if (model.embedded && model[0].size() == 1) {
                double lo = kInf, hi = -kInf;
                for (const auto& p : model.predictors) {
                    lo = std::min(lo, p[0]);
                    hi = std::max(hi, p[0]);
                }
                for (int i = 0; i < grid_resolution; ++i)
                    cands.push_back({lo + (hi - lo) * i / (grid_resolution - 1)});
            } else if (model.embedded) {
                for (size_t i = 0; i < model.size(); ++i)
                    for (size_t j = i + 1; j < model.size(); ++j)
                        for (int k = 1; k < 8; ++k) {
                            Predictor p(model[i].size());
                            const double l = k / 8.0;
                            for (size_t d = 0; d < p.size(); ++d)
                                p[d] = (1 - l) * model[i][d] + l * model[j][d];
                            cands.push_back(std::move(p));
                        }
                cands.push_back(pi.mean(model));
            }
            double best_v = kInf;
            const Predictor* best = nullptr;
            for (const auto& c : cands) {
                double worst = -kInf;
                for (const auto& z : zs) {
                    const double lf = loss->evaluate(c, z);
                    const double ml = mix_loss(pi, z, eta, loss, model);
                    worst = std::max(worst, (lf == kInf && ml == kInf) ? 0.0 : lf - ml);
                }
                if (worst < best_v) { best_v = worst; best = &c; }
            }
            Predictor chosen = *best;
            Decision d;
            d.params = chosen;
            d.loss_profile = [chosen, loss](const Outcome& z) { return loss->evaluate(chosen, z); };
            return d;
        }
    }
    throw Error("unreachable substitution kind");
}

double AARun::cumulative_loss() const {
    double s = 0;
    for (double l : losses) s += l;
    return s;
}
double AARun::cumulative_mix_loss() const {
    double s = 0;
    for (double l : mix_losses) s += l;
    return s;
}
double AARun::mix_loss_bound(const PredictorMixture& prior) const {
    double best = kInf;
    for (size_t f = 0; f < expert_cumloss.size(); ++f) {
        if (prior.w[f] == 0.0) continue;
        best = std::min(best, expert_cumloss[f] + std::log(1.0 / prior.w[f]) / eta);
    }
    return best;
}

AARun aggregating_algorithm(const Sample& stream, const Model& model, const Loss& loss, double eta,
                            const Substitution& substitution, const PredictorMixture& prior,
                            const DecisionProblem& problem) {
    if (!(eta > 0)) throw PreconditionViolated("aggregating_algorithm: eta must be > 0");
    prior.validate();
    const size_t N = model.size();
    AARun run;
    run.eta = eta;
    run.weights.push_back(prior);
    run.expert_cumloss.assign(N, 0.0);
    // Work in log-weights: log pi_t(f) = log prior(f) - eta * cumloss_t(f), renormalized.
    std::vector<double> logw(N);
    for (size_t f = 0; f < N; ++f)
        logw[f] = prior.w[f] > 0 ? std::log(prior.w[f]) : -kInf;

    for (const auto& z : stream.outcomes) {
        PredictorMixture pi = run.weights.back();
        Decision d = substitution.apply(pi, problem, eta);
        const double lplay = d.loss(z);
        const double ml = mix_loss(pi, z, eta, loss, model);
        run.decisions.push_back(std::move(d));
        run.losses.push_back(lplay);
        run.mix_losses.push_back(ml);
        // Exponential-weights update.
        for (size_t f = 0; f < N; ++f) {
            const double lf = loss->evaluate(model[f], z);
            run.expert_cumloss[f] += lf;
            if (logw[f] != -kInf) logw[f] += lf == kInf ? -kInf : -eta * lf;
            if (lf == kInf) logw[f] = -kInf;
        }
        const double lse = log_sum_exp(logw);
        if (lse == -kInf) throw Error("aggregating_algorithm: all experts have infinite loss");
        PredictorMixture next;
        next.w.resize(N);
        for (size_t f = 0; f < N; ++f)
            next.w[f] = logw[f] == -kInf ? 0.0 : std::exp(logw[f] - lse);
        run.weights.push_back(std::move(next));
    }
    return run;
}

ValueWithCi BatchEstimator::risk(const Distribution& P, const McPolicy& mc) const {
    if (mode == OtbMode::AverageDecision) {
        return risk_profile_ci(P, [this](const Outcome& z) { return decisions[0].loss(z); }, mc);
    }
    ValueWithCi out;
    out.value = 0;
    for (const auto& d : decisions) {
        const auto r = risk_profile_ci(P, [&](const Outcome& z) { return d.loss(z); }, mc);
        out.value += r.value;
        out.ci_halfwidth += r.ci_halfwidth;
        out.exact = out.exact && r.exact;
    }
    const double n = static_cast<double>(decisions.size());
    out.value /= n;
    out.ci_halfwidth /= n;
    return out;
}

BatchEstimator online_to_batch(const AARun& run, OtbMode mode, const Model& model) {
    BatchEstimator est;
    est.mode = mode;
    if (mode == OtbMode::UniformRound) {
        est.decisions = run.decisions;
        return est;
    }
    // Average the played parameter vectors; requires every decision embedded.
    if (run.decisions.empty()) throw PreconditionViolated("online_to_batch: empty run");
    for (const auto& d : run.decisions)
        if (!d.params) throw EmbeddingMissing("average-decision conversion needs parameter vectors");
    Predictor avg(run.decisions[0].params->size(), 0.0);
    for (const auto& d : run.decisions)
        for (size_t k = 0; k < avg.size(); ++k) avg[k] += (*d.params)[k];
    for (auto& v : avg) v /= static_cast<double>(run.decisions.size());
    (void)model;
    Decision dec;
    dec.params = avg;
    est.decisions.push_back(dec);
    return est;
}

RateCurve rate_experiment(const DecisionProblem& problem, const LearnerSpec& learner,
                          const std::vector<int>& ns, int reps, uint64_t seed,
                          const RateExperimentOptions& opts) {
    for (size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw PreconditionViolated("rate_experiment: ns must increase");
    RateCurve curve;
    curve.ns = ns;

    // Per-P best risks (the excess baseline), exact where possible.
    const size_t nP = problem.p_family.size();
    std::vector<double> base(nP);
    for (size_t p = 0; p < nP; ++p)
        base[p] = best_predictor(problem.p_family[p], problem.model, problem.loss, opts.mc).second;

    for (size_t ni = 0; ni < ns.size(); ++ni) {
        const int n = ns[ni];
        double worst_mean = -kInf, worst_se = 0.0;
        for (size_t p = 0; p < nP; ++p) {
            std::vector<double> excess(reps);
            parallel_for(reps, opts.threads, [&](int rep) {
                const Sample s = draw_sample(problem, p, n, seed, static_cast<uint64_t>(rep));
                double r;
                if (std::holds_alternative<ErmLearner>(learner)) {
                    const size_t f = erm(s, problem.model, problem.loss);
                    r = risk(problem.p_family[p], problem.model[f], problem.loss, opts.mc);
                } else {
                    const auto& aa = std::get<AaOtbLearner>(learner);
                    const auto run = aggregating_algorithm(
                        s, problem.model, problem.loss, aa.eta, aa.substitution,
                        PredictorMixture::uniform(problem.model.size()), problem);
                    const auto est = online_to_batch(run, aa.mode, problem.model);
                    r = est.risk(problem.p_family[p], opts.mc).value;
                }
                excess[rep] = r - base[p];
            });
            double mean = 0;
            for (double e : excess) mean += e;
            mean /= reps;
            double var = 0;
            for (double e : excess) var += (e - mean) * (e - mean);
            var = reps > 1 ? var / (reps - 1) : 0.0;
            const double se = std::sqrt(var / reps);
            if (mean > worst_mean) { worst_mean = mean; worst_se = se; }
        }
        curve.excess.push_back(worst_mean);
        curve.stderr_excess.push_back(worst_se);
    }

    std::vector<double> lx, ly;
    for (size_t i = 0; i < curve.ns.size(); ++i) {
        if (curve.excess[i] > 0) {
            lx.push_back(std::log(static_cast<double>(curve.ns[i])));
            ly.push_back(std::log(curve.excess[i]));
        }
    }
    const auto fit = fit_line(lx, ly);
    curve.slope = fit.slope;
    curve.slope_ci = {fit.slope - 1.96 * fit.stderr_slope, fit.slope + 1.96 * fit.stderr_slope};
    return curve;
}

}  // namespace fastrates
