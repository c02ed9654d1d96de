#pragma once

// JSON wire formats for problems and reports, and the rate-curve CSV.
// Numbers in CSV output are locale-independent ('.' decimal, 17 significant
// digits); JSON goes through nlohmann::json.

#include <string>

#include <json.hpp>

#include "fastrates/conditions.hpp"
#include "fastrates/learners.hpp"
#include "fastrates/problem.hpp"

namespace fastrates {

using Json = nlohmann::json;

Json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const Json& j);

// {loss: {name, params}, P: [...], F: [...], F_D: ...}
Json problem_to_json(const DecisionProblem& p);
DecisionProblem problem_from_json(const Json& j);

// {kind, eta, eps, verdict, worst_margin, witness: {p_index, pi, f}, ci}
Json report_to_json(const ConditionReport& r, const std::string& kind_override = "");

std::string format_g17(double v);

// Columns: n, excess, stderr, learner, problem, seed.
std::string rate_curve_csv(const RateCurve& c, const std::string& learner,
                           const std::string& problem, uint64_t seed);

Json rate_curve_summary(const RateCurve& c, const std::string& learner,
                        const std::string& problem, uint64_t seed);

}  // namespace fastrates
