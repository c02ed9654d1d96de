#include "fastrates/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fastrates/conditions.hpp"
#include "fastrates/errors.hpp"
#include "fastrates/learners.hpp"
#include "fastrates/momentbounds.hpp"
#include "fastrates/problems.hpp"
#include "fastrates/serialize.hpp"

namespace fastrates {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRefuted = 3;
constexpr int kExitInconclusive = 4;
constexpr int kExitInfeasible = 5;

// Strict key check: configs must not carry unknown keys.
void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

uint64_t effective_seed(uint64_t seed) {
    if (const char* env = std::getenv("FASTRATES_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw ConfigError("FASTRATES_SEED must be an unsigned integer");
        }
    }
    return seed;
}

int thread_count(const Json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "auto")
            return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        throw ConfigError("threads: expected a count or \"auto\"");
    }
    return v.get<int>();
}

SearchFamily search_from_json(const Json& j) {
    SearchFamily s;
    if (j.is_null()) return s;
    require_keys(j, {"vertex_mixtures", "pair_grid", "dirichlet_draws", "seed", "decision_grid"},
                 "search");
    if (j.contains("vertex_mixtures")) s.vertex_mixtures = j["vertex_mixtures"].get<bool>();
    if (j.contains("pair_grid")) s.pair_grid = j["pair_grid"].get<int>();
    if (j.contains("dirichlet_draws")) s.dirichlet_draws = j["dirichlet_draws"].get<int>();
    if (j.contains("seed")) s.seed = j["seed"].get<uint64_t>();
    if (j.contains("decision_grid")) s.decision_grid = j["decision_grid"].get<int>();
    return s;
}

ConditionKind kind_from_string(const std::string& s) {
    if (s == "central") return ConditionKind::Central;
    if (s == "ppc") return ConditionKind::PPC;
    if (s == "predictor") return ConditionKind::Predictor;
    if (s == "stoch_mix" || s == "stoch-mix") return ConditionKind::StochMix;
    if (s == "stoch_exp_concave" || s == "exp-concave") return ConditionKind::StochExpConcave;
    if (s == "classical_mix" || s == "classical-mix") return ConditionKind::ClassicalMix;
    throw ConfigError("unknown condition kind: " + s);
}

DecisionProblem build_problem(const std::string& name, const std::map<std::string, double>& params,
                              const std::optional<std::string>& problem_json) {
    if (problem_json) return problem_from_json(load_config(*problem_json));
    auto recipe = recipe_by_name(name, params);
    // A scalar p narrows bernoulli01 to the single law it names.
    if (name == "bernoulli01" && params.count("p")) {
        recipe.problem.p_family = {bernoulli(params.at("p"))};
    }
    return recipe.problem;
}

void emit(const Json& j, const std::optional<std::string>& output_path, std::ostream& out) {
    if (output_path) {
        std::ofstream f(*output_path);
        if (!f) throw ConfigError("cannot write output file: " + *output_path);
        f << j.dump(2) << "\n";
    } else {
        out << j.dump(2) << "\n";
    }
}

struct CommonArgs {
    std::string problem = "bernoulli01";
    std::vector<std::string> param_kv;
    std::optional<std::string> config_path;
    std::optional<std::string> problem_json;
    std::optional<std::string> output_path;
    uint64_t seed = 1;
    std::string threads = "1";

    std::map<std::string, double> params() const {
        std::map<std::string, double> m;
        for (const auto& kv : param_kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--param expects key=value: " + kv);
            m[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        return m;
    }
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--problem", a.problem, "problem recipe name");
    cmd->add_option("--param", a.param_kv, "recipe parameter key=value (repeatable)");
    cmd->add_option("--config", a.config_path, "JSON config file");
    cmd->add_option("--problem-json", a.problem_json, "load the problem from a JSON document");
    cmd->add_option("-o,--output", a.output_path, "write the report here instead of stdout");
    cmd->add_option("--seed", a.seed, "RNG seed (env FASTRATES_SEED overrides)");
    cmd->add_option("--threads", a.threads, "thread count or 'auto'");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"fast-rate condition toolkit"};
    app.require_subcommand(1);

    // ---- check ----
    auto* c_check = app.add_subcommand("check", "check a fast-rate condition on a problem");
    CommonArgs a_check;
    add_common(c_check, a_check);
    std::string kind_s = "central";
    double eta = 1.0, eps = 0.0, p_scalar = -1.0;
    c_check->add_option("--kind", kind_s, "central|ppc|predictor|stoch_mix|stoch_exp_concave|classical_mix");
    c_check->add_option("--eta", eta, "learning rate");
    c_check->add_option("--eps", eps, "slack");
    c_check->add_option("--p", p_scalar, "bernoulli success probability shorthand");

    // ---- max-eta ----
    auto* c_maxeta = app.add_subcommand("max-eta", "largest eta at which a condition holds");
    CommonArgs a_maxeta;
    add_common(c_maxeta, a_maxeta);
    std::string me_kind = "central";
    double me_eps = 0.0, me_tol = 1e-6, me_p = -1.0;
    c_maxeta->add_option("--kind", me_kind);
    c_maxeta->add_option("--eps", me_eps);
    c_maxeta->add_option("--tol", me_tol);
    c_maxeta->add_option("--p", me_p, "bernoulli success probability shorthand");

    // ---- bound ----
    auto* c_bound = app.add_subcommand("bound", "evaluate a rate bound formula");
    std::string b_type = "finite";
    RateBoundInputs b_in;
    double b_vc_k = 1.0, b_vc_c = 1.0, b_vpow_c = 1.0, b_vpow_alpha = 0.0;
    bool b_has_v = false;
    std::optional<std::string> b_out;
    c_bound->add_option("--type", b_type, "finite|intermediate|vc");
    c_bound->add_option("--V", b_in.v_range);
    c_bound->add_option("--eta-star", b_in.eta_star);
    c_bound->add_option("--N", b_in.n_class);
    c_bound->add_option("--delta", b_in.delta);
    c_bound->add_option("--n", b_in.n);
    c_bound->add_option("--c", b_in.c);
    c_bound->add_option("--K", b_vc_k);
    c_bound->add_option("--C", b_vc_c);
    c_bound->add_option("--v-coeff", b_vpow_c)->each([&](const std::string&) { b_has_v = true; });
    c_bound->add_option("--v-alpha", b_vpow_alpha)->each([&](const std::string&) { b_has_v = true; });
    c_bound->add_option("-o,--output", b_out);

    // ---- moment ----
    auto* c_moment = app.add_subcommand("moment", "CGF bound, LP oracle and dual certificate");
    double m_eta = 1.0, m_aon = 0.1, m_v = 1.0;
    int m_grid = 2001;
    std::optional<std::string> m_out;
    c_moment->add_option("--eta-star", m_eta);
    c_moment->add_option("--a-over-n", m_aon);
    c_moment->add_option("--V", m_v);
    c_moment->add_option("--grid", m_grid);
    c_moment->add_option("-o,--output", m_out);

    // ---- rates ----
    auto* c_rates = app.add_subcommand("rates", "empirical excess-risk rate curve");
    CommonArgs a_rates;
    add_common(c_rates, a_rates);
    std::string r_learner = "erm", r_subst = "mean", r_csv;
    double r_eta = 1.0;
    int r_reps = 200;
    std::vector<int> r_ns{64, 128, 256, 512, 1024, 2048, 4096};
    c_rates->add_option("--learner", r_learner, "erm|aa");
    c_rates->add_option("--eta", r_eta);
    c_rates->add_option("--substitution", r_subst, "mean|logloss-mean|grid-minimax");
    c_rates->add_option("--reps", r_reps);
    c_rates->add_option("--ns", r_ns, "sample sizes");
    c_rates->add_option("--csv", r_csv, "write the rate curve CSV here");

    // ---- aa-sim ----
    auto* c_aa = app.add_subcommand("aa-sim", "run the aggregating algorithm on one stream");
    CommonArgs a_aa;
    add_common(c_aa, a_aa);
    double aa_eta = 1.0;
    int aa_n = 100, aa_p_index = 0;
    std::string aa_subst = "mean";
    c_aa->add_option("--eta", aa_eta);
    c_aa->add_option("--n", aa_n);
    c_aa->add_option("--p-index", aa_p_index);
    c_aa->add_option("--substitution", aa_subst);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    auto substitution_of = [](const std::string& s) {
        Substitution sub;
        if (s == "mean") sub.kind = SubstitutionKind::Mean;
        else if (s == "logloss-mean") sub.kind = SubstitutionKind::LogLossMean;
        else if (s == "grid-minimax") sub.kind = SubstitutionKind::GridMinimax;
        else throw ConfigError("unknown substitution: " + s);
        return sub;
    };

    try {
        if (*c_check || *c_maxeta) {
            const bool is_check = static_cast<bool>(*c_check);
            CommonArgs& a = is_check ? a_check : a_maxeta;
            auto params = a.params();
            double pshort = is_check ? p_scalar : me_p;
            if (pshort >= 0) params["p"] = pshort;
            std::string kind_str = is_check ? kind_s : me_kind;
            double eps_v = is_check ? eps : me_eps;
            SearchFamily search;
            if (a.config_path) {
                const Json cfg = load_config(*a.config_path);
                require_keys(cfg,
                             {"problem", "params", "kind", "eta", "eps", "tol", "search", "seed",
                              "output_path", "threads", "problem_json"},
                             "config");
                if (cfg.contains("problem")) a.problem = cfg["problem"].get<std::string>();
                if (cfg.contains("params"))
                    for (const auto& [k, v] : cfg["params"].items()) params[k] = v.get<double>();
                if (cfg.contains("kind")) kind_str = cfg["kind"].get<std::string>();
                if (cfg.contains("eta")) eta = cfg["eta"].get<double>();
                if (cfg.contains("eps")) eps_v = cfg["eps"].get<double>();
                if (cfg.contains("tol")) me_tol = cfg["tol"].get<double>();
                if (cfg.contains("seed")) a.seed = cfg["seed"].get<uint64_t>();
                if (cfg.contains("output_path")) a.output_path = cfg["output_path"].get<std::string>();
                if (cfg.contains("search")) search = search_from_json(cfg["search"]);
                if (cfg.contains("problem_json")) a.problem_json = cfg["problem_json"].get<std::string>();
                if (cfg.contains("threads")) (void)thread_count(cfg["threads"]);
            }
            search.seed = effective_seed(a.seed);
            const auto problem = build_problem(a.problem, params, a.problem_json);
            const auto kind = kind_from_string(kind_str);
            if (is_check) {
                const auto rep = check_condition(problem, kind, eta, eps_v, search);
                emit(report_to_json(rep), a.output_path, out);
                switch (rep.verdict) {
                    case Verdict::Holds: return kExitOk;
                    case Verdict::RefutedOnTestedFamily: return kExitRefuted;
                    case Verdict::Inconclusive: return kExitInconclusive;
                }
            }
            MaxEtaOptions mo;
            mo.tol = me_tol;
            const double v = max_eta(problem, kind, eps_v, search, mo);
            emit(Json{{"eta_max", v}}, a.output_path, out);
            return kExitOk;
        }

        if (*c_bound) {
            Json j;
            if (b_type == "finite") {
                j["bound"] = finite_class_bound(b_in);
            } else if (b_type == "intermediate") {
                const VFunction v = b_has_v ? VFunction::power(b_vpow_c, b_vpow_alpha)
                                            : VFunction::constant(b_in.eta_star);
                const auto r = intermediate_rate_bound(v, b_in.n_class, b_in.delta, b_in.n, b_in.c,
                                                       b_in.v_range);
                j["applicable"] = r.has_value();
                j["bound"] = r ? Json(*r) : Json(nullptr);
            } else if (b_type == "vc") {
                b_in.covering_k = b_vc_k;
                b_in.covering_c = b_vc_c;
                j["bound"] = vc_type_bound(b_in);
            } else {
                throw ConfigError("bound --type must be finite|intermediate|vc");
            }
            emit(j, b_out, out);
            return kExitOk;
        }

        if (*c_moment) {
            Json j;
            try {
                const double bound = cgf_half_eta_bound(m_eta, m_aon, m_v);
                const auto oracle =
                    moment_lp_oracle(MomentProblemInstance{m_eta, m_aon, m_v}, m_grid);
                const auto cert = dual_certificate_for(m_v * m_eta);
                j["bound"] = bound;
                j["oracle"] = oracle;
                j["feasibility"] =
                    feasible_moment(m_v * m_eta, m_aon / m_v) == Feasibility::Interior
                        ? "interior"
                        : "boundary";
                j["dual"] = Json{{"d0", cert.d0}, {"d1", cert.d1}, {"d2", cert.d2}, {"c2", cert.c2}};
            } catch (const InfeasibleInstance& e) {
                err << "error: " << e.what() << "\n";
                return kExitInfeasible;
            }
            emit(j, m_out, out);
            return kExitOk;
        }

        if (*c_rates) {
            auto params = a_rates.params();
            int threads = 1;
            if (a_rates.config_path) {
                const Json cfg = load_config(*a_rates.config_path);
                require_keys(cfg,
                             {"problem", "params", "learner", "eta", "substitution", "ns", "reps",
                              "seed", "output_path", "csv", "threads"},
                             "config");
                if (cfg.contains("problem")) a_rates.problem = cfg["problem"].get<std::string>();
                if (cfg.contains("params"))
                    for (const auto& [k, v] : cfg["params"].items()) params[k] = v.get<double>();
                if (cfg.contains("learner")) r_learner = cfg["learner"].get<std::string>();
                if (cfg.contains("eta")) r_eta = cfg["eta"].get<double>();
                if (cfg.contains("substitution")) r_subst = cfg["substitution"].get<std::string>();
                if (cfg.contains("ns")) r_ns = cfg["ns"].get<std::vector<int>>();
                if (cfg.contains("reps")) r_reps = cfg["reps"].get<int>();
                if (cfg.contains("seed")) a_rates.seed = cfg["seed"].get<uint64_t>();
                if (cfg.contains("output_path")) a_rates.output_path = cfg["output_path"].get<std::string>();
                if (cfg.contains("csv")) r_csv = cfg["csv"].get<std::string>();
                if (cfg.contains("threads")) threads = thread_count(cfg["threads"]);
            }
            if (a_rates.threads != "1")
                threads = thread_count(Json(a_rates.threads == "auto" ? Json("auto") : Json(std::stoi(a_rates.threads))));
            const uint64_t seed = effective_seed(a_rates.seed);
            const auto problem = build_problem(a_rates.problem, params, a_rates.problem_json);
            LearnerSpec learner = ErmLearner{};
            if (r_learner == "aa")
                learner = AaOtbLearner{r_eta, substitution_of(r_subst), OtbMode::UniformRound};
            else if (r_learner != "erm")
                throw ConfigError("learner must be erm|aa");
            RateExperimentOptions opts;
            opts.threads = threads;
            const auto curve = rate_experiment(problem, learner, r_ns, r_reps, seed, opts);
            const std::string csv = rate_curve_csv(curve, r_learner, a_rates.problem, seed);
            if (!r_csv.empty()) {
                std::ofstream f(r_csv);
                if (!f) throw ConfigError("cannot write csv: " + r_csv);
                f << csv;
            }
            emit(rate_curve_summary(curve, r_learner, a_rates.problem, seed), a_rates.output_path,
                 out);
            return kExitOk;
        }

        if (*c_aa) {
            const auto params = a_aa.params();
            const uint64_t seed = effective_seed(a_aa.seed);
            const auto problem = build_problem(a_aa.problem, params, a_aa.problem_json);
            const auto sample = draw_sample(problem, aa_p_index, aa_n, seed);
            const auto run = aggregating_algorithm(sample, problem.model, problem.loss, aa_eta,
                                                   substitution_of(aa_subst),
                                                   PredictorMixture::uniform(problem.model.size()),
                                                   problem);
            Json j;
            j["n"] = aa_n;
            j["eta"] = aa_eta;
            j["cumulative_loss"] = run.cumulative_loss();
            j["cumulative_mix_loss"] = run.cumulative_mix_loss();
            double best = kInf;
            for (double v : run.expert_cumloss) best = std::min(best, v);
            j["best_expert_loss"] = best;
            j["regret"] = run.cumulative_loss() - best;
            j["mix_loss_regret_bound"] = std::log(static_cast<double>(problem.model.size())) / aa_eta;
            emit(j, a_aa.output_path, out);
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleInstance& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    err << "error: no subcommand\n";
    return kExitConfig;
}

}  // namespace fastrates
