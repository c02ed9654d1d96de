#pragma once

// Outcomes and distributions. A distribution is either an exact finite-support
// measure or a seeded sampler; samplers may carry a scalar moment oracle
// (mean, E[Z^2], E[Z^4], MGF) that makes risk and exponential-moment
// computations exact for losses whose excess is affine in the outcome.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fastrates/errors.hpp"
#include "fastrates/numeric.hpp"
#include "fastrates/rng.hpp"

namespace fastrates {

// Outcome: scalar payload plus an optional covariate index for conditional
// problems (x < 0 means unconditional).
struct Outcome {
    double y = 0.0;
    int x = -1;

    friend bool operator==(const Outcome& a, const Outcome& b) {
        return a.y == b.y && a.x == b.x;
    }
};

struct FiniteSupport {
    std::vector<Outcome> outcomes;
    std::vector<double> probs;
};

// Exact scalar moments of the sampler's marginal law of y.
struct ScalarMoments {
    double mean = 0.0;
    double m2 = 0.0;                       // E[Z^2]
    std::optional<double> m4;              // E[Z^4]
    std::function<double(double)> mgf;     // t -> E[e^{tZ}], +inf where divergent
};

struct Sampler {
    std::string name;
    std::map<std::string, double> params;
    // Deterministic given (seed, index); index addresses the i-th draw of a stream.
    std::function<Outcome(uint64_t seed, uint64_t index)> draw;
    std::optional<ScalarMoments> moments;
};

class Distribution {
public:
    Distribution() = default;

    static Distribution finite(std::vector<Outcome> outcomes, std::vector<double> probs) {
        if (outcomes.size() != probs.size() || outcomes.empty())
            throw Error("finite support: outcomes/probs size mismatch");
        double tot = 0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw Error("finite support: negative probability");
            tot += p;
        }
        if (std::abs(tot - 1.0) > 1e-12) throw Error("finite support: probabilities must sum to 1");
        Distribution d;
        d.rep_ = FiniteSupport{std::move(outcomes), std::move(probs)};
        return d;
    }

    // Convenience for scalar finite supports.
    static Distribution finite_scalar(const std::vector<double>& ys, std::vector<double> probs) {
        std::vector<Outcome> outs;
        outs.reserve(ys.size());
        for (double y : ys) outs.push_back({y, -1});
        return finite(std::move(outs), std::move(probs));
    }

    static Distribution sampler(Sampler s) {
        Distribution d;
        d.rep_ = std::move(s);
        return d;
    }

    bool is_finite_support() const { return std::holds_alternative<FiniteSupport>(rep_); }
    const FiniteSupport& finite_support() const { return std::get<FiniteSupport>(rep_); }
    const Sampler& sampler() const { return std::get<Sampler>(rep_); }

    const std::optional<ScalarMoments>& moments() const {
        static const std::optional<ScalarMoments> none;
        if (is_finite_support()) return none;
        return std::get<Sampler>(rep_).moments;
    }

private:
    std::variant<FiniteSupport, Sampler> rep_;
};

inline Distribution bernoulli(double p) {
    return Distribution::finite_scalar({0.0, 1.0}, {1.0 - p, p});
}

inline Distribution point_mass(double y) {
    return Distribution::finite_scalar({y}, {1.0});
}

inline Distribution gaussian_sampler(double mean, double var) {
    Sampler s;
    s.name = "gaussian";
    s.params = {{"mean", mean}, {"var", var}};
    const double sd = std::sqrt(var);
    s.draw = [mean, sd](uint64_t seed, uint64_t index) {
        Stream st(seed, index);
        return Outcome{mean + sd * st.normal(), -1};
    };
    ScalarMoments m;
    m.mean = mean;
    m.m2 = var + mean * mean;
    m.m4 = 3 * var * var + 6 * var * mean * mean + mean * mean * mean * mean;
    m.mgf = [mean, var](double t) { return std::exp(mean * t + 0.5 * var * t * t); };
    s.moments = m;
    return Distribution::sampler(std::move(s));
}

// Symmetric two-component Gaussian mixture (means +-m, unit variance):
// subgaussian with proxy variance 1 + m^2.
inline Distribution gaussian_symmetric_mixture(double m) {
    Sampler s;
    s.name = "gauss2mix";
    s.params = {{"m", m}};
    s.draw = [m](uint64_t seed, uint64_t index) {
        Stream st(seed, index);
        const double sign = st.uniform01() < 0.5 ? -1.0 : 1.0;
        return Outcome{sign * m + st.normal(), -1};
    };
    ScalarMoments mo;
    mo.mean = 0.0;
    mo.m2 = 1.0 + m * m;
    mo.m4 = 3.0 + 6.0 * m * m + m * m * m * m;
    mo.mgf = [m](double t) { return std::exp(0.5 * t * t) * std::cosh(m * t); };
    s.moments = mo;
    return Distribution::sampler(std::move(s));
}

// Student-t with 5 degrees of freedom: density ~ c/z^6 in the tails, all
// exponential moments divergent, fourth moment 25.
inline Distribution student_t5_sampler() {
    Sampler s;
    s.name = "student_t5";
    s.draw = [](uint64_t seed, uint64_t index) {
        Stream st(seed, index);
        const double z = st.normal();
        double chi2 = 0.0;
        for (int i = 0; i < 5; ++i) { const double g = st.normal(); chi2 += g * g; }
        return Outcome{z / std::sqrt(chi2 / 5.0), -1};
    };
    ScalarMoments m;
    m.mean = 0.0;
    m.m2 = 5.0 / 3.0;   // nu/(nu-2)
    m.m4 = 25.0;        // 3 nu^2 / ((nu-2)(nu-4))
    m.mgf = [](double t) { return t == 0.0 ? 1.0 : kInf; };
    s.moments = m;
    return Distribution::sampler(std::move(s));
}

}  // namespace fastrates
