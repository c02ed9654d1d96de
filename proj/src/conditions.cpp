#include "fastrates/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fastrates/errors.hpp"
#include "fastrates/momentbounds.hpp"
#include "fastrates/rng.hpp"

namespace fastrates {

std::string to_string(ConditionKind k) {
    switch (k) {
        case ConditionKind::Central: return "central";
        case ConditionKind::PPC: return "ppc";
        case ConditionKind::Predictor: return "predictor";
        case ConditionKind::StochMix: return "stoch_mix";
        case ConditionKind::StochExpConcave: return "stoch_exp_concave";
        case ConditionKind::ClassicalMix: return "classical_mix";
        case ConditionKind::JRT2: return "jrt2";
    }
    return "?";
}

std::vector<double> SearchFamily::lambda_grid() const {
    // Log-spaced small weights catch near-vertex violations (the regime the
    // two-point derivative argument lives in), plus a few bulk points.
    std::vector<double> ls;
    const int m = std::max(2, pair_grid);
    for (int i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / (m - 1);
        ls.push_back(std::pow(10.0, -4.0 + t * (std::log10(0.5) + 4.0)));
    }
    ls.push_back(0.75);
    ls.push_back(0.9);
    return ls;
}

std::vector<PredictorMixture> mixture_family(size_t n, const SearchFamily& search, int root) {
    std::vector<PredictorMixture> fam;
    if (search.vertex_mixtures)
        for (size_t f = 0; f < n; ++f) fam.push_back(PredictorMixture::point(n, f));
    const auto ls = search.lambda_grid();
    if (root >= 0) {
        for (size_t f = 0; f < n; ++f) {
            if (f == static_cast<size_t>(root)) continue;
            for (double l : ls) fam.push_back(PredictorMixture::two_point(n, root, f, l));
        }
    } else {
        // both orientations, so any rooted two-point family is contained here
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                for (double l : ls) {
                    fam.push_back(PredictorMixture::two_point(n, i, j, l));
                    fam.push_back(PredictorMixture::two_point(n, j, i, l));
                }
    }
    if (search.dirichlet_draws > 0 && n >= 2) {
        Stream st(search.seed, 0xD1C4);
        for (int d = 0; d < search.dirichlet_draws; ++d)
            fam.push_back(PredictorMixture{dirichlet_uniform(st, n)});
    }
    return fam;
}

std::vector<Predictor> decision_candidates(const DecisionProblem& problem,
                                           const SearchFamily& search) {
    std::vector<Predictor> out;
    if (const auto* m = std::get_if<Model>(&problem.decision_set)) {
        out = m->predictors;
        return out;
    }
    // Hull or grid: model vertices plus a parameter grid. For 1-d embeddings
    // the hull is the interval spanned by the model.
    out = problem.model.predictors;
    double lo = kInf, hi = -kInf;
    int points = std::max(2, search.decision_grid);
    if (const auto* g = std::get_if<ActionGrid>(&problem.decision_set)) {
        lo = g->lo;
        hi = g->hi;
        points = std::max(points, g->points);
    } else {
        if (!problem.model.embedded)
            throw EmbeddingMissing("convex-hull decision set requires an embedding");
        if (problem.model[0].size() != 1) {
            // Multi-dimensional hull: pairwise segments at the lambda grid.
            const auto ls = search.lambda_grid();
            for (size_t i = 0; i < problem.model.size(); ++i)
                for (size_t j = i + 1; j < problem.model.size(); ++j)
                    for (double l : ls) {
                        Predictor p(problem.model[i].size());
                        for (size_t d = 0; d < p.size(); ++d)
                            p[d] = (1 - l) * problem.model[i][d] + l * problem.model[j][d];
                        out.push_back(std::move(p));
                    }
            return out;
        }
        for (const auto& p : problem.model.predictors) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
    }
    for (int i = 0; i < points; ++i)
        out.push_back({lo + (hi - lo) * i / (points - 1)});
    return out;
}

namespace {

// Decision search state: explicit candidates, plus an optional 1-d affine
// segment spanning the model for convex refinement. Every built-in loss is
// convex along an affine segment of parameters, so ternary search closes the
// grid-resolution gap in the "exists f" quantifier that separates a critical
// rate from a near-critical one.
struct DecisionSearch {
    std::vector<Predictor> candidates;
    bool refine = false;
    Predictor seg_lo, seg_hi;
};

DecisionSearch build_decision_search(const DecisionProblem& problem, const SearchFamily& search) {
    DecisionSearch ds;
    ds.candidates = decision_candidates(problem, search);
    if (std::holds_alternative<Model>(problem.decision_set) || !problem.model.embedded)
        return ds;
    // Detect a 1-dimensional affine hull of the model parameters.
    const auto& preds = problem.model.predictors;
    const size_t dim = preds[0].size();
    size_t lo = 0, hi = 0;
    size_t axis = dim;  // first coordinate that varies
    for (size_t d = 0; d < dim && axis == dim; ++d)
        for (size_t i = 1; i < preds.size(); ++i)
            if (std::abs(preds[i][d] - preds[0][d]) > 1e-12) { axis = d; break; }
    if (axis == dim) return ds;  // all predictors identical
    for (size_t i = 1; i < preds.size(); ++i) {
        if (preds[i][axis] < preds[lo][axis]) lo = i;
        if (preds[i][axis] > preds[hi][axis]) hi = i;
    }
    const double span = preds[hi][axis] - preds[lo][axis];
    for (const auto& p : preds) {
        const double t = (p[axis] - preds[lo][axis]) / span;
        for (size_t d = 0; d < dim; ++d) {
            const double expect = preds[lo][d] + t * (preds[hi][d] - preds[lo][d]);
            if (std::abs(p[d] - expect) > 1e-10) return ds;  // not collinear
        }
    }
    ds.refine = true;
    ds.seg_lo = preds[lo];
    ds.seg_hi = preds[hi];
    if (const auto* g = std::get_if<ActionGrid>(&problem.decision_set)) {
        if (dim == 1) {
            ds.seg_lo = {g->lo};
            ds.seg_hi = {g->hi};
        }
    }
    return ds;
}

// Minimize a convex-along-segments objective over the decision search space.
// Returns the best value and the index of the nearest explicit candidate.
template <typename Obj>
std::pair<double, int> minimize_decision(const DecisionSearch& ds, const Obj& objective) {
    double best = kInf;
    int best_idx = -1;
    for (size_t c = 0; c < ds.candidates.size(); ++c) {
        const double v = objective(ds.candidates[c]);
        if (v < best) { best = v; best_idx = static_cast<int>(c); }
    }
    if (ds.refine) {
        const size_t dim = ds.seg_lo.size();
        auto at = [&](double t) {
            Predictor p(dim);
            for (size_t d = 0; d < dim; ++d) p[d] = ds.seg_lo[d] + t * (ds.seg_hi[d] - ds.seg_lo[d]);
            return p;
        };
        double a = 0.0, b = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            if (objective(at(m1)) <= objective(at(m2))) b = m2;
            else a = m1;
        }
        const double v = objective(at(0.5 * (a + b)));
        if (v < best) best = v;
    }
    return {best, best_idx};
}

// E_P[e^{eta (l_f - l_g)}] - 1, signed and cancellation-free where exact.
struct ExpMomentExcess {
    double a_minus_1 = 0.0;  // +inf marks a divergent moment
    double ci = 0.0;
    bool exact = true;
};

ExpMomentExcess exp_moment_excess(const Distribution& P, const Predictor& f, const Predictor& g,
                                  const Loss& loss, double eta, const McPolicy& mc) {
    ExpMomentExcess out;
    if (P.is_finite_support()) {
        const auto& fs = P.finite_support();
        double s = 0.0;
        for (size_t i = 0; i < fs.outcomes.size(); ++i) {
            if (fs.probs[i] == 0.0) continue;
            const double lf = loss->evaluate(f, fs.outcomes[i]);
            const double lg = loss->evaluate(g, fs.outcomes[i]);
            if (lf == kInf && lg == kInf)
                throw UndefinedExpectation("exp moment: inf - inf on positive mass");
            if (lg == kInf) { out.a_minus_1 = kInf; return out; }
            if (lf == kInf) { s -= fs.probs[i]; continue; }  // e^{-inf} = 0
            s += fs.probs[i] * std::expm1(eta * (lf - lg));
        }
        out.a_minus_1 = s;
        return out;
    }
    if (const auto& mo = P.moments()) {
        if (auto ae = loss->affine_excess(f, g)) {
            const double m = mo->mgf(eta * ae->a);
            out.a_minus_1 = m == kInf ? kInf : std::expm1(eta * ae->b + std::log(m));
            return out;
        }
    }
    const auto& sp = P.sampler();
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < mc.n; ++i) {
        const Outcome z = sp.draw(mc.seed, static_cast<uint64_t>(i));
        const double lf = loss->evaluate(f, z);
        const double lg = loss->evaluate(g, z);
        if (lg == kInf) { out.a_minus_1 = kInf; out.exact = false; return out; }
        const double v = lf == kInf ? -1.0 : std::expm1(eta * (lf - lg));
        sum += v;
        sumsq += v * v;
    }
    const double n = mc.n;
    out.a_minus_1 = sum / n;
    out.ci = 1.96 * std::sqrt(std::max(0.0, sumsq / n - out.a_minus_1 * out.a_minus_1) / n);
    out.exact = false;
    return out;
}

struct MarginRow {
    double margin = -kInf;
    double ci = 0.0;
    bool exact = true;
    Witness witness;
    bool infinite = false;
};

ConditionReport finalize(ConditionKind kind, double eta, double eps,
                         const std::vector<MarginRow>& rows, double tol) {
    ConditionReport rep;
    rep.kind = kind;
    rep.eta = eta;
    rep.eps = eps;
    const MarginRow* worst = nullptr;
    const MarginRow* refuting = nullptr;
    bool straddle = false;
    double max_ci = 0.0;
    for (const auto& r : rows) {
        if (!worst || r.margin > worst->margin) worst = &r;
        const double lo = r.exact ? r.margin : r.margin - 2 * r.ci;
        const double hiM = r.exact ? r.margin : r.margin + 2 * r.ci;
        if (lo > tol && (!refuting || r.margin > refuting->margin)) refuting = &r;
        if (!r.exact) {
            max_ci = std::max(max_ci, r.ci);
            if (lo <= tol && hiM > tol) straddle = true;
        }
    }
    if (worst) {
        rep.worst_margin = worst->margin;
        rep.witness = worst->witness;
    }
    if (refuting) {
        rep.verdict = Verdict::RefutedOnTestedFamily;
        rep.worst_margin = refuting->margin;
        rep.witness = refuting->witness;
        rep.infinite_moment = refuting->infinite;
    } else if (straddle) {
        rep.verdict = Verdict::Inconclusive;
    } else {
        rep.verdict = Verdict::Holds;
    }
    if (max_ci > 0) rep.mc_ci = max_ci;
    return rep;
}

}  // namespace

ConditionReport check_condition(const DecisionProblem& problem, ConditionKind kind, double eta,
                                double eps, const SearchFamily& search,
                                const CheckOptions& opts) {
    if (!(eta > 0)) throw PreconditionViolated("check_condition: eta must be > 0");
    if (!(eps >= 0)) throw PreconditionViolated("check_condition: eps must be >= 0");
    const size_t N = problem.model.size();
    const double rhs_excess = std::expm1(eta * eps);  // e^{eta eps} - 1
    std::vector<MarginRow> rows;

    auto push_inf = [&](int p, std::vector<double> pi, int f) {
        MarginRow r;
        r.margin = kInf;
        r.infinite = true;
        r.witness = {p, std::move(pi), f};
        rows.push_back(r);
    };

    switch (kind) {
        case ConditionKind::Central: {
            // E_Z E_{f~Pi}[e^{eta(l_phi(P) - l_f)}] <= e^{eta eps}; linear in Pi,
            // so the per-vertex values determine every mixture's margin.
            for (size_t p = 0; p < problem.p_family.size(); ++p) {
                const auto [star, rstar] = best_predictor(problem.p_family[p], problem.model,
                                                          problem.loss, opts.mc);
                (void)rstar;
                std::vector<ExpMomentExcess> vert(N);
                for (size_t f = 0; f < N; ++f)
                    vert[f] = exp_moment_excess(problem.p_family[p], problem.model[star],
                                                problem.model[f], problem.loss, eta, opts.mc);
                const auto fam = mixture_family(N, search, static_cast<int>(star));
                for (const auto& pi : fam) {
                    double m = 0.0, ci = 0.0;
                    bool exact = true, infinite = false;
                    int worst_f = -1;
                    double worst_v = -kInf;
                    for (size_t f = 0; f < N; ++f) {
                        if (pi.w[f] == 0.0) continue;
                        if (vert[f].a_minus_1 == kInf) { infinite = true; worst_f = (int)f; break; }
                        m += pi.w[f] * vert[f].a_minus_1;
                        ci += pi.w[f] * vert[f].ci;
                        exact = exact && vert[f].exact;
                        if (vert[f].a_minus_1 > worst_v) { worst_v = vert[f].a_minus_1; worst_f = (int)f; }
                    }
                    if (infinite) {
                        push_inf((int)p, pi.w, worst_f);
                        continue;
                    }
                    MarginRow r;
                    r.margin = m - rhs_excess;
                    r.ci = ci;
                    r.exact = exact;
                    r.witness = {(int)p, pi.w, worst_f};
                    rows.push_back(std::move(r));
                }
            }
            break;
        }
        case ConditionKind::PPC: {
            for (size_t p = 0; p < problem.p_family.size(); ++p) {
                const auto [star, rstar] = best_predictor(problem.p_family[p], problem.model,
                                                          problem.loss, opts.mc);
                const auto fam = mixture_family(N, search, static_cast<int>(star));
                for (const auto& pi : fam) {
                    const auto em = expected_mix_loss(problem.p_family[p], pi, eta, problem.loss,
                                                      problem.model, opts.mc);
                    MarginRow r;
                    r.margin = rstar - em.value - eps;
                    r.ci = em.ci_halfwidth;
                    r.exact = em.exact;
                    r.witness = {(int)p, pi.w, (int)star};
                    rows.push_back(std::move(r));
                }
            }
            break;
        }
        case ConditionKind::StochMix:
        case ConditionKind::StochExpConcave: {
            const bool mean_sub = kind == ConditionKind::StochExpConcave;
            DecisionSearch ds;
            if (!mean_sub) ds = build_decision_search(problem, search);
            const auto fam = mixture_family(N, search, -1);
            for (const auto& pi : fam) {
                // exists f (fixed across P) with E[l_f] <= E[m_Pi] + eps for all P
                std::vector<ValueWithCi> emix(problem.p_family.size());
                bool exact = true;
                double ci = 0.0;
                for (size_t p = 0; p < problem.p_family.size(); ++p) {
                    emix[p] = expected_mix_loss(problem.p_family[p], pi, eta, problem.loss,
                                                problem.model, opts.mc);
                    exact = exact && emix[p].exact;
                    ci = std::max(ci, emix[p].ci_halfwidth);
                }
                int worst_p = -1;
                auto objective = [&](const Predictor& f) {
                    double worst = -kInf;
                    for (size_t p = 0; p < problem.p_family.size(); ++p) {
                        const auto rf = risk_ci(problem.p_family[p], f, problem.loss, opts.mc);
                        exact = exact && rf.exact;
                        const double mg = rf.value - emix[p].value - eps;
                        if (mg > worst) { worst = mg; worst_p = (int)p; }
                    }
                    return worst;
                };
                MarginRow r;
                if (mean_sub) {
                    r.margin = objective(pi.mean(problem.model));
                    r.witness = {worst_p, pi.w, -1};
                } else {
                    const auto [margin, idx] = minimize_decision(ds, objective);
                    r.margin = margin;
                    r.witness = {worst_p, pi.w, idx};
                }
                r.ci = 2 * ci;
                r.exact = exact;
                rows.push_back(std::move(r));
            }
            break;
        }
        case ConditionKind::Predictor: {
            const auto ds = build_decision_search(problem, search);
            const auto fam = mixture_family(N, search, -1);
            for (const auto& pi : fam) {
                bool exact = true;
                double ci = 0.0;
                int worst_p = -1;
                auto objective = [&](const Predictor& f) {
                    double worst = -kInf;
                    for (size_t p = 0; p < problem.p_family.size(); ++p) {
                        double m = 0.0;
                        for (size_t g = 0; g < N; ++g) {
                            if (pi.w[g] == 0.0) continue;
                            const auto e = exp_moment_excess(problem.p_family[p], f,
                                                             problem.model[g], problem.loss, eta,
                                                             opts.mc);
                            if (e.a_minus_1 == kInf) { m = kInf; break; }
                            m += pi.w[g] * e.a_minus_1;
                            ci = std::max(ci, e.ci);
                            exact = exact && e.exact;
                        }
                        const double mg = m == kInf ? kInf : m - rhs_excess;
                        if (mg > worst) { worst = mg; worst_p = (int)p; }
                    }
                    return worst;
                };
                const auto [margin, idx] = minimize_decision(ds, objective);
                if (margin == kInf) {
                    push_inf(worst_p, pi.w, idx);
                    continue;
                }
                MarginRow r;
                r.margin = margin;
                r.ci = ci;
                r.exact = exact;
                r.witness = {worst_p, pi.w, idx};
                rows.push_back(std::move(r));
            }
            break;
        }
        case ConditionKind::ClassicalMix: {
            // Pointwise over a finite outcome space: for every Pi there must be
            // a decision dominating the mix loss everywhere.
            std::vector<Outcome> zs;
            for (const auto& P : problem.p_family) {
                if (!P.is_finite_support())
                    throw UnsupportedKind("classical mixability needs a finite outcome space");
                for (const auto& z : P.finite_support().outcomes) {
                    bool seen = false;
                    for (const auto& w : zs)
                        if (w == z) { seen = true; break; }
                    if (!seen) zs.push_back(z);
                }
            }
            const auto ds = build_decision_search(problem, search);
            const auto fam = mixture_family(N, search, -1);
            for (const auto& pi : fam) {
                std::vector<double> mls;
                mls.reserve(zs.size());
                for (const auto& z : zs)
                    mls.push_back(mix_loss(pi, z, eta, problem.loss, problem.model));
                auto objective = [&](const Predictor& f) {
                    double worst = -kInf;
                    for (size_t i = 0; i < zs.size(); ++i) {
                        const double lf = problem.loss->evaluate(f, zs[i]);
                        const double mg =
                            (lf == kInf && mls[i] == kInf) ? 0.0 : lf - mls[i] - eps;
                        worst = std::max(worst, mg);
                    }
                    return worst;
                };
                const auto [margin, idx] = minimize_decision(ds, objective);
                MarginRow r;
                r.margin = margin;
                r.witness = {-1, pi.w, idx};
                rows.push_back(std::move(r));
            }
            break;
        }
        case ConditionKind::JRT2:
            throw UnsupportedKind("use check_jrt2 for the pairwise gamma condition");
    }
    return finalize(kind, eta, eps, rows, opts.tolerance);
}

double max_eta(const DecisionProblem& problem, ConditionKind kind, double eps,
               const SearchFamily& search, const MaxEtaOptions& opts) {
    CheckOptions copts;
    copts.tolerance = opts.margin_tolerance;
    auto holds = [&](double eta) {
        return check_condition(problem, kind, eta, eps, search, copts).verdict == Verdict::Holds;
    };
    const double floor = opts.tol;
    if (!holds(floor)) return 0.0;
    double lo = floor, hi = std::max(1.0, 2 * floor);
    while (holds(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi >= opts.eta_cap) return opts.eta_cap;
    }
    while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? lo : hi) = mid;
    }
    return lo;
}

ConditionReport check_bernstein(const DecisionProblem& problem, const VFunction& u,
                                BernsteinForm form, const CheckOptions& opts) {
    // Shape constraints of the Bernstein-side function.
    double xmax = 1.0;
    if (auto r = problem.loss->declared_range()) xmax = std::max(1.0, r->second - r->first);
    u.require_nondecreasing(0.0, xmax);
    u.require_slope_nonincreasing(xmax * 1e-6, xmax);

    std::vector<MarginRow> rows;
    for (size_t p = 0; p < problem.p_family.size(); ++p) {
        const auto [star, rstar] = best_predictor(problem.p_family[p], problem.model, problem.loss,
                                                  opts.mc);
        (void)rstar;
        for (size_t f = 0; f < problem.model.size(); ++f) {
            if (f == star) continue;
            const auto ms = excess_loss_moments(problem.p_family[p], problem.model[f],
                                                problem.model[star], problem.loss, opts.mc);
            const double lhs = form == BernsteinForm::SecondMoment ? ms.second_moment : ms.variance;
            const double mean = std::max(0.0, ms.mean);
            MarginRow r;
            r.margin = lhs - u(mean);
            r.ci = ms.ci_halfwidth;
            r.exact = ms.exact;
            r.witness = {(int)p, {}, (int)f};
            rows.push_back(std::move(r));
        }
    }
    auto rep = finalize(ConditionKind::Central, 0.0, 0.0, rows, opts.tolerance);
    rep.kind = ConditionKind::Central;  // reported under its own name below
    return rep;
}

VFunction bernstein_to_v(const VFunction& u, double loss_range_a, double cap_b) {
    if (!(loss_range_a > 0) || !(cap_b > 0))
        throw PreconditionViolated("bernstein_to_v: a > 0 and b > 0 required");
    u.require_nondecreasing(0.0, std::max(1.0, loss_range_a));
    u.require_slope_nonincreasing(1e-9, std::max(1.0, loss_range_a));
    const double c1b = 1.0 / kappa(2.0 * cap_b * loss_range_a);
    switch (u.kind()) {
        case VFunction::Kind::Constant:
            return VFunction::power(c1b / u.coeff(), 1.0, cap_b);
        case VFunction::Kind::Power:
            return VFunction::power(c1b / u.coeff(), 1.0 - u.alpha(), cap_b);
        default: {
            std::vector<double> xs, ys;
            for (int i = 1; i <= 512; ++i) {
                const double x = loss_range_a * i / 512.0;
                xs.push_back(x);
                ys.push_back(std::min(c1b * x / u(x), cap_b));
            }
            return VFunction::tabulated(std::move(xs), std::move(ys), cap_b);
        }
    }
}

VFunction v_to_bernstein(const VFunction& v, double loss_range_a) {
    if (!(loss_range_a > 0)) throw PreconditionViolated("v_to_bernstein: a > 0 required");
    v.require_slope_nondecreasing(loss_range_a * 1e-9, loss_range_a);
    const double b = v.sup_on(loss_range_a);
    if (!(b > 0) || !std::isfinite(b)) throw ShapeViolation("v_to_bernstein: sup v must be finite");
    const double c2 = 6.0 / kappa(-2.0 * b * loss_range_a);
    const bool cap_binds =
        v.kind() == VFunction::Kind::Power && std::isfinite(v.cap()) &&
        v.coeff() * std::pow(loss_range_a, v.alpha()) > v.cap() * (1 + 1e-12);
    switch (v.kind()) {
        case VFunction::Kind::Constant:
            return VFunction::power(c2 / v.coeff(), 1.0);
        case VFunction::Kind::Power:
            if (!cap_binds) {
                if (v.alpha() == 1.0) return VFunction::constant(c2 / v.coeff());
                return VFunction::power(c2 / v.coeff(), 1.0 - v.alpha());
            }
            [[fallthrough]];
        default: {
            std::vector<double> xs, ys;
            for (int i = 1; i <= 512; ++i) {
                const double x = loss_range_a * i / 512.0;
                xs.push_back(x);
                ys.push_back(c2 * x / v(x));
            }
            return VFunction::tabulated(std::move(xs), std::move(ys));
        }
    }
}

MinimaxGap minimax_gap(const DecisionProblem& problem, const PredictorMixture& pi, double eta,
                       const SearchFamily& search, const CheckOptions& opts) {
    const auto ds = build_decision_search(problem, search);
    const size_t P = problem.p_family.size(), N = problem.model.size();
    auto S = [&](size_t p, const Predictor& f) {
        double v = 1.0;
        for (size_t g = 0; g < N; ++g) {
            if (pi.w[g] == 0.0) continue;
            const auto e = exp_moment_excess(problem.p_family[p], f, problem.model[g],
                                             problem.loss, eta, opts.mc);
            if (e.a_minus_1 == kInf) return kInf;
            v += pi.w[g] * e.a_minus_1;
        }
        return v;
    };
    MinimaxGap out;
    out.supinf = -kInf;
    for (size_t p = 0; p < P; ++p) {
        const auto [inf_f, idx] = minimize_decision(ds, [&](const Predictor& f) { return S(p, f); });
        (void)idx;
        out.supinf = std::max(out.supinf, inf_f);
    }
    const auto [infsup, idx2] = minimize_decision(ds, [&](const Predictor& f) {
        double sup_p = -kInf;
        for (size_t p = 0; p < P; ++p) sup_p = std::max(sup_p, S(p, f));
        return sup_p;
    });
    (void)idx2;
    out.infsup = infsup;
    return out;
}

std::optional<UniquenessWitness> uniqueness_probe(const DecisionProblem& problem,
                                                  const Distribution& P, double eps, double delta,
                                                  const McPolicy& mc) {
    const auto [star, rstar] = best_predictor(P, problem.model, problem.loss, mc);
    std::optional<UniquenessWitness> best;
    for (size_t f = 0; f < problem.model.size(); ++f) {
        if (f == star) continue;
        const double gap = risk(P, problem.model[f], problem.loss, mc) - rstar;
        if (gap > delta) continue;
        const auto ms = excess_loss_moments(P, problem.model[f], problem.model[star], problem.loss,
                                            mc);
        if (ms.variance < eps) continue;
        if (!best || ms.variance > best->variance) best = UniquenessWitness{f, gap, ms.variance};
    }
    return best;
}

ConditionReport check_jrt2(const DecisionProblem& problem, const GammaFn& gamma, double eta,
                           const SearchFamily& search, const CheckOptions& opts) {
    const size_t N = problem.model.size();
    for (size_t f = 0; f < N; ++f) {
        const double g = gamma(problem.model[f], problem.model[f]);
        if (std::abs(g - 1.0) > 1e-9)
            throw GammaShapeViolation("jrt2: gamma(f, f) must equal 1");
    }
    if (problem.model.embedded) {
        // Midpoint concavity of g -> gamma(f, g) on the embedding.
        for (size_t f = 0; f < N; ++f)
            for (size_t i = 0; i < N; ++i)
                for (size_t j = i + 1; j < N; ++j) {
                    Predictor mid(problem.model[i].size());
                    for (size_t d = 0; d < mid.size(); ++d)
                        mid[d] = 0.5 * (problem.model[i][d] + problem.model[j][d]);
                    const double lhs = gamma(problem.model[f], mid);
                    const double rhs = 0.5 * (gamma(problem.model[f], problem.model[i]) +
                                              gamma(problem.model[f], problem.model[j]));
                    if (lhs + 1e-9 < rhs)
                        throw GammaShapeViolation("jrt2: gamma(f, .) fails midpoint concavity");
                }
    }
    std::vector<MarginRow> rows;
    bool all_exact = true;
    for (size_t p = 0; p < problem.p_family.size(); ++p)
        for (size_t f = 0; f < N; ++f)
            for (size_t g = 0; g < N; ++g) {
                const auto e = exp_moment_excess(problem.p_family[p], problem.model[f],
                                                 problem.model[g], problem.loss, eta, opts.mc);
                MarginRow r;
                if (e.a_minus_1 == kInf) {
                    r.margin = kInf;
                    r.infinite = true;
                } else {
                    // E[e^{eta(l_f - l_g)}] - gamma(f,g) = (E - 1) - (gamma - 1)
                    r.margin = e.a_minus_1 - (gamma(problem.model[f], problem.model[g]) - 1.0);
                }
                r.ci = e.ci;
                r.exact = e.exact;
                all_exact = all_exact && e.exact;
                r.witness = {(int)p, {}, (int)f};
                rows.push_back(std::move(r));
            }
    auto rep = finalize(ConditionKind::JRT2, eta, 0.0, rows, opts.tolerance);
    if (rep.verdict == Verdict::Holds && all_exact) {
        // Pairwise control plus concavity implies exp-concavity on the family.
        const auto ec = check_condition(problem, ConditionKind::StochExpConcave, eta, 0.0, search,
                                        opts);
        if (ec.verdict == Verdict::RefutedOnTestedFamily)
            throw Error("jrt2: exp-concavity implication violated (implementation bug)");
    }
    return rep;
}

}  // namespace fastrates
