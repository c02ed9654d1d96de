#pragma once

// Finite models, mixtures over a model, and decision sets.

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "fastrates/errors.hpp"
#include "fastrates/loss.hpp"

namespace fastrates {

// A finite indexed family of predictors; ids are positions 0..N-1. The
// parameter vectors double as the embedding when `embedded` is set, enabling
// convex-hull decisions and mean substitution.
struct Model {
    std::vector<Predictor> predictors;
    bool embedded = true;

    size_t size() const { return predictors.size(); }
    const Predictor& operator[](size_t id) const { return predictors[id]; }

    static Model from_scalars(const std::vector<double>& xs, bool embedded = true) {
        Model m;
        m.embedded = embedded;
        m.predictors.reserve(xs.size());
        for (double x : xs) m.predictors.push_back({x});
        return m;
    }
};

struct PredictorMixture {
    std::vector<double> w;

    static PredictorMixture uniform(size_t n) {
        return PredictorMixture{std::vector<double>(n, 1.0 / static_cast<double>(n))};
    }
    static PredictorMixture point(size_t n, size_t id) {
        std::vector<double> w(n, 0.0);
        w[id] = 1.0;
        return PredictorMixture{std::move(w)};
    }
    static PredictorMixture two_point(size_t n, size_t i, size_t j, double lambda) {
        std::vector<double> w(n, 0.0);
        w[i] += 1.0 - lambda;
        w[j] += lambda;
        return PredictorMixture{std::move(w)};
    }

    void validate() const {
        double tot = 0;
        for (double x : w) {
            if (!(x >= 0.0)) throw Error("mixture weights must be nonnegative");
            tot += x;
        }
        if (std::abs(tot - 1.0) > 1e-12) throw Error("mixture weights must sum to 1");
    }

    Predictor mean(const Model& model) const {
        if (!model.embedded) throw EmbeddingMissing("mean of mixture requires an embedding");
        if (model.size() == 0 || w.size() != model.size())
            throw Error("mixture/model size mismatch");
        Predictor m(model[0].size(), 0.0);
        for (size_t f = 0; f < w.size(); ++f)
            for (size_t d = 0; d < m.size(); ++d) m[d] += w[f] * model[f][d];
        return m;
    }
};

// Decision sets: the model itself, its convex hull (reachable through the
// embedding), or a 1-d action grid standing in for "all functions".
struct ConvexHullOfModel {};
struct ActionGrid {
    double lo = 0.0, hi = 1.0;
    int points = 101;
};

using DecisionSet = std::variant<Model, ConvexHullOfModel, ActionGrid>;

}  // namespace fastrates
