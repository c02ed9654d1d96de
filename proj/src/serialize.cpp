#include "fastrates/serialize.hpp"

#include <cstdio>

#include "fastrates/errors.hpp"

namespace fastrates {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json distribution_to_json(const Distribution& d) {
    if (d.is_finite_support()) {
        const auto& fs = d.finite_support();
        Json outs = Json::array();
        bool conditional = false;
        for (const auto& z : fs.outcomes) conditional = conditional || z.x >= 0;
        for (const auto& z : fs.outcomes) {
            if (conditional)
                outs.push_back(Json::array({z.x, z.y}));
            else
                outs.push_back(z.y);
        }
        return Json{{"finite", {{"outcomes", outs}, {"probs", fs.probs}}}};
    }
    const auto& sp = d.sampler();
    return Json{{"sampler", {{"name", sp.name}, {"params", sp.params}}}};
}

Distribution distribution_from_json(const Json& j) {
    if (j.contains("finite")) {
        const auto& f = j.at("finite");
        std::vector<Outcome> outs;
        for (const auto& o : f.at("outcomes")) {
            if (o.is_array())
                outs.push_back({o.at(1).get<double>(), o.at(0).get<int>()});
            else
                outs.push_back({o.get<double>(), -1});
        }
        return Distribution::finite(std::move(outs), f.at("probs").get<std::vector<double>>());
    }
    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        const std::string name = s.at("name").get<std::string>();
        std::map<std::string, double> params;
        if (s.contains("params")) params = s.at("params").get<std::map<std::string, double>>();
        if (name == "gaussian")
            return gaussian_sampler(params.count("mean") ? params["mean"] : 0.0,
                                    params.count("var") ? params["var"] : 1.0);
        if (name == "gauss2mix") return gaussian_symmetric_mixture(params.count("m") ? params["m"] : 1.0);
        if (name == "student_t5") return student_t5_sampler();
        throw ConfigError("unknown sampler name: " + name);
    }
    throw ConfigError("distribution spec must have 'finite' or 'sampler'");
}

Json problem_to_json(const DecisionProblem& p) {
    Json j;
    j["loss"] = Json{{"name", p.loss->name()}, {"params", Json::object()}};
    j["P"] = Json::array();
    for (const auto& d : p.p_family) j["P"].push_back(distribution_to_json(d));
    j["F"] = Json::array();
    for (const auto& f : p.model.predictors) j["F"].push_back(f);
    if (const auto* m = std::get_if<Model>(&p.decision_set)) {
        Json fd = Json::array();
        for (const auto& f : m->predictors) fd.push_back(f);
        j["F_D"] = Json{{"model", fd}};
    } else if (std::holds_alternative<ConvexHullOfModel>(p.decision_set)) {
        j["F_D"] = "convex-hull-of-model";
    } else {
        const auto& g = std::get<ActionGrid>(p.decision_set);
        j["F_D"] = Json{{"grid", {{"lo", g.lo}, {"hi", g.hi}, {"points", g.points}}}};
    }
    return j;
}

namespace {
Loss loss_by_name(const std::string& name, const Json& params) {
    if (name == "zero_one") return make_zero_one();
    if (name == "squared")
        return make_squared(params.contains("B") ? params.at("B").get<double>() : kInf);
    if (name == "normal_log") return make_normal_log();
    if (name == "pmf_log") return make_pmf_log();
    if (name == "brier") return make_brier(params.at("k").get<int>());
    throw ConfigError("unknown loss name: " + name);
}
}  // namespace

DecisionProblem problem_from_json(const Json& j) {
    DecisionProblem p;
    const auto& l = j.at("loss");
    p.loss = loss_by_name(l.at("name").get<std::string>(),
                          l.contains("params") ? l.at("params") : Json::object());
    for (const auto& d : j.at("P")) p.p_family.push_back(distribution_from_json(d));
    Model m;
    for (const auto& f : j.at("F")) m.predictors.push_back(f.get<Predictor>());
    p.model = std::move(m);
    const auto& fd = j.at("F_D");
    if (fd.is_string()) {
        if (fd.get<std::string>() != "convex-hull-of-model")
            throw ConfigError("unknown decision set descriptor");
        p.decision_set = ConvexHullOfModel{};
    } else if (fd.contains("model")) {
        Model dm;
        for (const auto& f : fd.at("model")) dm.predictors.push_back(f.get<Predictor>());
        p.decision_set = std::move(dm);
    } else if (fd.contains("grid")) {
        const auto& g = fd.at("grid");
        p.decision_set = ActionGrid{g.at("lo").get<double>(), g.at("hi").get<double>(),
                                    g.at("points").get<int>()};
    } else {
        throw ConfigError("bad decision set spec");
    }
    p.validate();
    return p;
}

Json report_to_json(const ConditionReport& r, const std::string& kind_override) {
    Json j;
    j["kind"] = kind_override.empty() ? to_string(r.kind) : kind_override;
    j["eta"] = r.eta;
    j["eps"] = r.eps;
    switch (r.verdict) {
        case Verdict::Holds: j["verdict"] = "holds"; break;
        case Verdict::RefutedOnTestedFamily: j["verdict"] = "refuted_on_tested_family"; break;
        case Verdict::Inconclusive: j["verdict"] = "inconclusive"; break;
    }
    j["worst_margin"] = r.worst_margin == kInf ? Json("inf") : Json(r.worst_margin);
    j["witness"] = Json{{"p_index", r.witness.p_index}, {"pi", r.witness.pi}, {"f", r.witness.f}};
    if (r.mc_ci) j["ci"] = *r.mc_ci;
    if (r.infinite_moment) j["infinite_moment"] = true;
    return j;
}

std::string rate_curve_csv(const RateCurve& c, const std::string& learner,
                           const std::string& problem, uint64_t seed) {
    std::string out = "n,excess,stderr,learner,problem,seed\n";
    for (size_t i = 0; i < c.ns.size(); ++i) {
        out += std::to_string(c.ns[i]) + "," + format_g17(c.excess[i]) + "," +
               format_g17(c.stderr_excess[i]) + "," + learner + "," + problem + "," +
               std::to_string(seed) + "\n";
    }
    return out;
}

Json rate_curve_summary(const RateCurve& c, const std::string& learner,
                        const std::string& problem, uint64_t seed) {
    Json j;
    j["learner"] = learner;
    j["problem"] = problem;
    j["seed"] = seed;
    j["ns"] = c.ns;
    j["excess"] = c.excess;
    j["stderr"] = c.stderr_excess;
    j["slope"] = c.slope;
    j["slope_ci"] = Json::array({c.slope_ci.first, c.slope_ci.second});
    return j;
}

}  // namespace fastrates
