#include "fastrates/problems.hpp"

#include <algorithm>
#include <cmath>

#include "fastrates/errors.hpp"

namespace fastrates {

double bernoulli_eta_max(double p) {
    if (p < 0.5) p = 1.0 - p;
    if (p == 0.5) return 0.0;
    if (p >= 1.0) return kInf;
    return std::log(p / (1.0 - p));
}

ProblemRecipe bernoulli_01(double delta, int grid) {
    if (delta < 0 || delta > 0.5) throw PreconditionViolated("bernoulli_01: delta in [0, 1/2]");
    // Margin ladder: geometric from a small floor (or from delta) to 1/2.
    std::vector<double> margins;
    if (delta == 0.0) margins.push_back(0.0);
    double m = std::max(delta, 0.004);
    while (static_cast<int>(margins.size()) < grid && m < 0.5) {
        margins.push_back(m);
        m *= 2.0;
    }
    if (margins.empty() || margins.back() < 0.5) margins.push_back(0.5);
    ProblemRecipe r;
    r.name = "bernoulli01";
    r.params = {{"delta", delta}, {"grid", static_cast<double>(grid)}};
    r.problem.loss = make_zero_one();
    for (double mg : margins) r.problem.p_family.push_back(bernoulli(0.5 + mg));
    r.problem.model = Model::from_scalars({0.0, 1.0});
    r.problem.decision_set = r.problem.model;
    r.problem.validate();
    r.expected["eta_max_at_max_margin"] = bernoulli_eta_max(0.5 + margins.back());
    r.expected["eta_max_at_min_margin"] = bernoulli_eta_max(0.5 + margins.front());
    return r;
}

ProblemRecipe bounded_squared(double B, int z_grid, int f_grid) {
    if (!(B > 0)) throw PreconditionViolated("bounded_squared: B > 0");
    ProblemRecipe r;
    r.name = "sqbounded";
    r.params = {{"B", B}, {"z_grid", (double)z_grid}, {"f_grid", (double)f_grid}};
    r.problem.loss = make_squared(B);
    std::vector<double> zs;
    for (int i = 0; i < z_grid; ++i) zs.push_back(-B + 2.0 * B * i / (z_grid - 1));
    // Point masses on the grid plus the uniform law: enough for pointwise
    // (classical) checks and gives the stochastic checks a convex handle.
    for (double z : zs) r.problem.p_family.push_back(point_mass(z));
    r.problem.p_family.push_back(
        Distribution::finite_scalar(zs, std::vector<double>(zs.size(), 1.0 / zs.size())));
    std::vector<double> fs;
    for (int i = 0; i < f_grid; ++i) fs.push_back(-B + 2.0 * B * i / (f_grid - 1));
    r.problem.model = Model::from_scalars(fs);
    r.problem.decision_set = ConvexHullOfModel{};
    r.problem.validate();
    r.expected["classical_mixable_eta"] = 1.0 / (B * B);
    r.expected["exp_concave_eta"] = 1.0 / (4.0 * B * B);
    return r;
}

ProblemRecipe subgaussian_location(double sigma2, double mean_range, int f_grid) {
    if (!(sigma2 > 0)) throw PreconditionViolated("subgaussian_location: sigma2 > 0");
    ProblemRecipe r;
    r.name = "subgauss";
    r.params = {{"sigma2", sigma2}, {"mean_range", mean_range}, {"f_grid", (double)f_grid}};
    r.problem.loss = make_squared();
    std::vector<double> means;
    for (int i = 0; i < f_grid; ++i)
        means.push_back(-mean_range + 2.0 * mean_range * i / (f_grid - 1));
    // Family members are Gaussians at grid means; the grid therefore contains
    // each law's optimal predictor, as the comparator selection requires.
    for (double mu : means) r.problem.p_family.push_back(gaussian_sampler(mu, sigma2));
    r.problem.model = Model::from_scalars(means);
    r.problem.decision_set = r.problem.model;
    r.expected["central_eta_at_least"] = 1.0 / sigma2;
    return r;
}

ProblemRecipe normal_location_logloss(const std::vector<double>& nu_grid,
                                      const std::vector<double>& mu_grid) {
    ProblemRecipe r;
    r.name = "normloc";
    r.problem.loss = make_normal_log();
    for (double nu : nu_grid) r.problem.p_family.push_back(gaussian_sampler(nu, 1.0));
    r.problem.model = Model::from_scalars(mu_grid);
    r.problem.decision_set = r.problem.model;
    r.expected["central_eta"] = 1.0;
    r.expected["erm_excess_coeff"] = 0.5;  // expected excess risk 1/(2n) for the continuous ERM
    return r;
}

ProblemRecipe heavy_tail_squared() {
    ProblemRecipe r;
    r.name = "heavytail";
    // Student t5 center: density >= c2/z^6 beyond c1 = sqrt(5) with
    // c2 = 125/8 * Gamma(3)/(sqrt(5 pi) Gamma(5/2)); fourth moment 25.
    r.params = {{"A", 25.0}, {"c1", std::sqrt(5.0)}, {"c2", 125.0 / 8.0 * 8.0 / (3.0 * M_PI * std::sqrt(5.0))}};
    r.problem.loss = make_squared();
    r.problem.p_family.push_back(student_t5_sampler());
    std::vector<double> mus;
    for (int i = 0; i <= 20; ++i) mus.push_back(-1.0 + 0.1 * i);
    r.problem.model = Model::from_scalars(mus);
    r.problem.decision_set = r.problem.model;
    r.expected["central_eta"] = 0.0;
    r.expected["bernstein_u_coeff"] = 4.0 * std::sqrt(25.0) + 1.0;
    return r;
}

ProblemRecipe brier(int num_outcomes, int forecast_grid) {
    if (num_outcomes < 2) throw PreconditionViolated("brier: num_outcomes >= 2");
    ProblemRecipe r;
    r.name = "brier";
    r.params = {{"num_outcomes", (double)num_outcomes}, {"forecast_grid", (double)forecast_grid}};
    r.problem.loss = make_brier(num_outcomes);
    std::vector<double> ys;
    for (int k = 0; k < num_outcomes; ++k) ys.push_back(static_cast<double>(k));
    for (int k = 0; k < num_outcomes; ++k) r.problem.p_family.push_back(point_mass(ys[k]));
    r.problem.p_family.push_back(
        Distribution::finite_scalar(ys, std::vector<double>(ys.size(), 1.0 / num_outcomes)));
    Model m;
    if (num_outcomes == 2) {
        for (int i = 0; i < forecast_grid; ++i) {
            const double q = static_cast<double>(i) / (forecast_grid - 1);
            m.predictors.push_back({1.0 - q, q});
        }
    } else {
        // Coarse simplex grid for K = 3 (larger K: vertices + barycenter).
        if (num_outcomes == 3) {
            const int g = std::max(2, forecast_grid / 2);
            for (int i = 0; i <= g; ++i)
                for (int j = 0; i + j <= g; ++j) {
                    const double a = static_cast<double>(i) / g, b = static_cast<double>(j) / g;
                    m.predictors.push_back({a, b, 1.0 - a - b});
                }
        } else {
            for (int k = 0; k < num_outcomes; ++k) {
                Predictor p(num_outcomes, 0.0);
                p[k] = 1.0;
                m.predictors.push_back(std::move(p));
            }
            m.predictors.push_back(Predictor(num_outcomes, 1.0 / num_outcomes));
        }
    }
    r.problem.model = std::move(m);
    r.problem.decision_set = ConvexHullOfModel{};
    r.problem.validate();
    r.expected["classical_mixable_eta"] = 1.0;
    return r;
}

ProblemRecipe recipe_by_name(const std::string& name,
                             const std::map<std::string, double>& params) {
    auto get = [&](const std::string& k, double dflt) {
        const auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    if (name == "bernoulli01")
        return bernoulli_01(get("delta", 0.25), static_cast<int>(get("grid", 8)));
    if (name == "sqbounded")
        return bounded_squared(get("B", 1.0), static_cast<int>(get("z_grid", 9)),
                               static_cast<int>(get("f_grid", 9)));
    if (name == "subgauss")
        return subgaussian_location(get("sigma2", 1.0), get("mean_range", 2.0),
                                    static_cast<int>(get("f_grid", 9)));
    if (name == "normloc") {
        std::vector<double> nus{get("nu", 0.0)};
        std::vector<double> mus;
        const double lo = get("mu_lo", -2.0), hi = get("mu_hi", 2.0);
        const int g = static_cast<int>(get("mu_grid", 41));
        for (int i = 0; i < g; ++i) mus.push_back(lo + (hi - lo) * i / (g - 1));
        return normal_location_logloss(nus, mus);
    }
    if (name == "heavytail") return heavy_tail_squared();
    if (name == "brier")
        return brier(static_cast<int>(get("num_outcomes", 2)),
                     static_cast<int>(get("forecast_grid", 11)));
    throw ConfigError("unknown problem recipe: " + name);
}

}  // namespace fastrates
