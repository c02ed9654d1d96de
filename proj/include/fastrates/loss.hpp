#pragma once

// Loss functions. A predictor/action is a parameter vector (scalar actions
// are 1-vectors, probability forecasts are K-vectors). Losses may expose two
// optional closed forms that unlock exact computations under sampler
// distributions with a moment oracle:
//   - affine_excess(f, g):  l_f(z) - l_g(z) = a*z.y + b          (scalar z)
//   - risk_quadratic(f):    l_f(z) = alpha*z.y^2 + beta*z.y + c  (scalar z)

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastrates/distribution.hpp"
#include "fastrates/errors.hpp"
#include "fastrates/numeric.hpp"

namespace fastrates {

using Predictor = std::vector<double>;

struct AffineExcess {
    double a = 0.0;
    double b = 0.0;
};

struct QuadraticRisk {
    double alpha = 0.0;
    double beta = 0.0;
    double c = 0.0;
};

class LossBase {
public:
    virtual ~LossBase() = default;
    virtual std::string name() const = 0;
    virtual double evaluate(const Predictor& f, const Outcome& z) const = 0;
    virtual std::optional<std::pair<double, double>> declared_range() const { return std::nullopt; }
    virtual std::optional<AffineExcess> affine_excess(const Predictor&, const Predictor&) const {
        return std::nullopt;
    }
    virtual std::optional<QuadraticRisk> risk_quadratic(const Predictor&) const {
        return std::nullopt;
    }
};

using Loss = std::shared_ptr<const LossBase>;

class ZeroOneLoss final : public LossBase {
public:
    std::string name() const override { return "zero_one"; }
    double evaluate(const Predictor& f, const Outcome& z) const override {
        return std::abs(z.y - f[0]);
    }
    std::optional<std::pair<double, double>> declared_range() const override {
        return std::make_pair(0.0, 1.0);
    }
};

class SquaredLoss final : public LossBase {
public:
    explicit SquaredLoss(double range_b = kInf) : b_(range_b) {}
    std::string name() const override { return "squared"; }
    double evaluate(const Predictor& f, const Outcome& z) const override {
        const double d = z.y - f[0];
        return 0.5 * d * d;
    }
    std::optional<std::pair<double, double>> declared_range() const override {
        if (!std::isfinite(b_)) return std::nullopt;
        return std::make_pair(0.0, 2.0 * b_ * b_);
    }
    std::optional<AffineExcess> affine_excess(const Predictor& f, const Predictor& g) const override {
        // 0.5(z-f)^2 - 0.5(z-g)^2 = (g-f) z + (f^2-g^2)/2
        return AffineExcess{g[0] - f[0], 0.5 * (f[0] * f[0] - g[0] * g[0])};
    }
    std::optional<QuadraticRisk> risk_quadratic(const Predictor& f) const override {
        return QuadraticRisk{0.5, -f[0], 0.5 * f[0] * f[0]};
    }

private:
    double b_;
};

// -log of a unit-variance normal density with mean f[0].
class NormalLogLoss final : public LossBase {
public:
    std::string name() const override { return "normal_log"; }
    double evaluate(const Predictor& f, const Outcome& z) const override {
        const double d = z.y - f[0];
        return 0.5 * std::log(2.0 * M_PI) + 0.5 * d * d;
    }
    std::optional<AffineExcess> affine_excess(const Predictor& f, const Predictor& g) const override {
        return AffineExcess{g[0] - f[0], 0.5 * (f[0] * f[0] - g[0] * g[0])};
    }
    std::optional<QuadraticRisk> risk_quadratic(const Predictor& f) const override {
        return QuadraticRisk{0.5, -f[0], 0.5 * f[0] * f[0] + 0.5 * std::log(2.0 * M_PI)};
    }
};

// Log loss over an explicit pmf on outcomes {0,...,K-1}; predictors are pmfs.
class PmfLogLoss final : public LossBase {
public:
    std::string name() const override { return "pmf_log"; }
    double evaluate(const Predictor& f, const Outcome& z) const override {
        const auto k = static_cast<size_t>(z.y);
        if (k >= f.size()) throw Error("pmf_log: outcome index out of range");
        return f[k] > 0.0 ? -std::log(f[k]) : kInf;
    }
};

// Brier score on K outcomes; predictors are probability K-vectors.
class BrierLoss final : public LossBase {
public:
    explicit BrierLoss(int k) : k_(k) {}
    std::string name() const override { return "brier"; }
    double evaluate(const Predictor& f, const Outcome& z) const override {
        const auto y = static_cast<size_t>(z.y);
        double s = 0.0;
        for (size_t j = 0; j < static_cast<size_t>(k_); ++j) {
            const double d = f[j] - (j == y ? 1.0 : 0.0);
            s += d * d;
        }
        return s;
    }
    std::optional<std::pair<double, double>> declared_range() const override {
        return std::make_pair(0.0, 2.0);
    }

private:
    int k_;
};

inline Loss make_zero_one() { return std::make_shared<ZeroOneLoss>(); }
inline Loss make_squared(double range_b = kInf) { return std::make_shared<SquaredLoss>(range_b); }
inline Loss make_normal_log() { return std::make_shared<NormalLogLoss>(); }
inline Loss make_pmf_log() { return std::make_shared<PmfLogLoss>(); }
inline Loss make_brier(int k) { return std::make_shared<BrierLoss>(k); }

}  // namespace fastrates
