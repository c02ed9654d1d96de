#include "fastrates/problem.hpp"

#include <algorithm>
#include <cmath>

#include "fastrates/errors.hpp"
#include "fastrates/rng.hpp"

namespace fastrates {

namespace {

// Exact expectation of a finite-support integrand with the +inf convention.
// Lower-bounded losses cannot produce inf - inf, but guard anyway.
double finite_expectation(const FiniteSupport& fs, const std::function<double(const Outcome&)>& g) {
    double s = 0.0;
    bool pos_inf = false, neg_inf = false;
    for (size_t i = 0; i < fs.outcomes.size(); ++i) {
        if (fs.probs[i] == 0.0) continue;
        const double v = g(fs.outcomes[i]);
        if (v == kInf) { pos_inf = true; continue; }
        if (v == -kInf) { neg_inf = true; continue; }
        s += fs.probs[i] * v;
    }
    if (pos_inf && neg_inf) throw UndefinedExpectation("integrand mixes +inf and -inf mass");
    if (pos_inf) return kInf;
    if (neg_inf) return -kInf;
    return s;
}

ValueWithCi mc_expectation(const Sampler& sp, const std::function<double(const Outcome&)>& g,
                           const McPolicy& mc) {
    double sum = 0.0, sumsq = 0.0;
    bool inf_seen = false;
    for (int i = 0; i < mc.n; ++i) {
        const Outcome z = sp.draw(mc.seed, static_cast<uint64_t>(i));
        const double v = g(z);
        if (v == kInf) { inf_seen = true; break; }
        sum += v;
        sumsq += v * v;
    }
    if (inf_seen) return {kInf, 0.0, false};
    const double n = mc.n;
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    return {mean, 1.96 * std::sqrt(var / n), false};
}

}  // namespace

ValueWithCi risk_profile_ci(const Distribution& P, const std::function<double(const Outcome&)>& lf,
                            const McPolicy& mc) {
    if (P.is_finite_support()) return {finite_expectation(P.finite_support(), lf), 0.0, true};
    return mc_expectation(P.sampler(), lf, mc);
}

ValueWithCi risk_ci(const Distribution& P, const Predictor& f, const Loss& loss,
                    const McPolicy& mc) {
    if (P.is_finite_support())
        return {finite_expectation(P.finite_support(),
                                   [&](const Outcome& z) { return loss->evaluate(f, z); }),
                0.0, true};
    if (const auto& mo = P.moments()) {
        if (auto q = loss->risk_quadratic(f))
            return {q->alpha * mo->m2 + q->beta * mo->mean + q->c, 0.0, true};
    }
    return mc_expectation(P.sampler(), [&](const Outcome& z) { return loss->evaluate(f, z); }, mc);
}

double risk(const Distribution& P, const Predictor& f, const Loss& loss, const McPolicy& mc) {
    return risk_ci(P, f, loss, mc).value;
}

std::pair<size_t, double> best_predictor(const Distribution& P, const Model& model,
                                         const Loss& loss, const McPolicy& mc) {
    if (model.size() == 0) throw Error("best_predictor: empty model");
    size_t best = 0;
    double best_risk = kInf;
    for (size_t id = 0; id < model.size(); ++id) {
        const double r = risk(P, model[id], loss, mc);
        if (r < best_risk) { best_risk = r; best = id; }
    }
    if (best_risk == kInf) throw AllInfiniteRisk("no finite-risk predictor in model");
    return {best, best_risk};
}

void DecisionProblem::validate(const McPolicy& mc) const {
    if (!loss) throw Error("decision problem: missing loss");
    if (model.size() == 0) throw Error("decision problem: empty model");
    if (p_family.empty()) throw Error("decision problem: empty distribution family");
    for (const auto& P : p_family) best_predictor(P, model, loss, mc);  // throws if all infinite
}

double mix_loss(const PredictorMixture& pi, const Outcome& z, double eta, const Loss& loss,
                const Model& model) {
    if (!(eta > 0)) throw PreconditionViolated("mix_loss: eta must be > 0");
    // -(1/eta) * LSE_f(log pi_f - eta*l_f); pull out max for stability.
    double m = -kInf;
    std::vector<double> terms;
    terms.reserve(pi.w.size());
    for (size_t f = 0; f < pi.w.size(); ++f) {
        if (pi.w[f] == 0.0) continue;
        const double lf = loss->evaluate(model[f], z);
        const double t = lf == kInf ? -kInf : std::log(pi.w[f]) - eta * lf;
        terms.push_back(t);
        m = std::max(m, t);
    }
    if (m == -kInf) return kInf;  // all weighted losses are +inf
    double s = 0.0;
    for (double t : terms)
        if (t != -kInf) s += std::exp(t - m);
    return -(m + std::log(s)) / eta;
}

ValueWithCi expected_mix_loss(const Distribution& P, const PredictorMixture& pi, double eta,
                              const Loss& loss, const Model& model, const McPolicy& mc) {
    return risk_profile_ci(
        P, [&](const Outcome& z) { return mix_loss(pi, z, eta, loss, model); }, mc);
}

MomentSummary excess_loss_moments(const Distribution& P, const Predictor& f,
                                  const Predictor& fstar, const Loss& loss, const McPolicy& mc) {
    MomentSummary out;
    if (P.is_finite_support()) {
        const auto fs = P.finite_support();  // copy so the mgf closure owns its data
        std::vector<double> w;               // excess values with positive mass
        std::vector<double> pr;
        for (size_t i = 0; i < fs.outcomes.size(); ++i) {
            if (fs.probs[i] == 0.0) continue;
            const double lf = loss->evaluate(f, fs.outcomes[i]);
            const double lg = loss->evaluate(fstar, fs.outcomes[i]);
            if (lf == kInf && lg == kInf)
                throw UndefinedExpectation("excess loss inf - inf on positive mass");
            w.push_back(lf == kInf ? kInf : lf - lg);
            pr.push_back(fs.probs[i]);
        }
        double mean = 0, m2 = 0;
        bool inf = false;
        for (size_t i = 0; i < w.size(); ++i) {
            if (w[i] == kInf) { inf = true; continue; }
            mean += pr[i] * w[i];
            m2 += pr[i] * w[i] * w[i];
        }
        out.mean = inf ? kInf : mean;
        out.second_moment = inf ? kInf : m2;
        out.variance = inf ? kInf : std::max(0.0, m2 - mean * mean);
        out.mgf = [w, pr](double t) {
            if (t == 0.0) return 1.0;
            double s = 0.0;
            for (size_t i = 0; i < w.size(); ++i) {
                if (w[i] == kInf) {
                    if (t > 0) return kInf;
                    continue;  // e^{t*inf} = 0 for t < 0
                }
                s += pr[i] * std::exp(t * w[i]);
            }
            return s;
        };
        return out;
    }

    if (const auto& mo = P.moments()) {
        if (auto ae = loss->affine_excess(f, fstar)) {
            const double a = ae->a, b = ae->b;
            const double var_z = std::max(0.0, mo->m2 - mo->mean * mo->mean);
            out.mean = a * mo->mean + b;
            out.variance = a * a * var_z;
            out.second_moment = a * a * mo->m2 + 2 * a * b * mo->mean + b * b;
            auto mgf_z = mo->mgf;
            out.mgf = [a, b, mgf_z](double t) {
                if (t == 0.0) return 1.0;
                const double mz = mgf_z(a * t);
                return mz == kInf ? kInf : std::exp(t * b) * mz;
            };
            return out;
        }
    }

    // Monte Carlo fallback (moments only; the MGF estimate reuses the draws).
    const auto& sp = P.sampler();
    std::vector<double> ws;
    ws.reserve(mc.n);
    double mean = 0, m2 = 0;
    for (int i = 0; i < mc.n; ++i) {
        const Outcome z = sp.draw(mc.seed, static_cast<uint64_t>(i));
        const double v = loss->evaluate(f, z) - loss->evaluate(fstar, z);
        ws.push_back(v);
        mean += v;
        m2 += v * v;
    }
    mean /= mc.n;
    m2 /= mc.n;
    out.mean = mean;
    out.second_moment = m2;
    out.variance = std::max(0.0, m2 - mean * mean);
    out.ci_halfwidth = 1.96 * std::sqrt(out.variance / mc.n);
    out.exact = false;
    out.mgf = [ws = std::move(ws)](double t) {
        if (t == 0.0) return 1.0;
        double s = 0.0;
        for (double v : ws) s += std::exp(t * v);
        return s / static_cast<double>(ws.size());
    };
    return out;
}

}  // namespace fastrates
