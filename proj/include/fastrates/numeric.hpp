#pragma once

// Small numeric helpers shared across the library: extended-real conventions,
// stable log-sum-exp, and least-squares slope fitting.
//
// Extended-real convention: losses live in [-B, +inf]; exp(-eta * inf) == 0,
// and an expectation that puts positive mass on +inf is +inf.

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace fastrates {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

// exp(-eta * loss) with the e^{-eta*inf} = 0 convention.
inline double exp_neg(double eta_times_loss) {
    if (eta_times_loss == kInf) return 0.0;
    return std::exp(-eta_times_loss);
}

// log(sum_i exp(a_i)) over possibly -inf entries; returns -inf if all are.
inline double log_sum_exp(std::span<const double> a) {
    double m = -kInf;
    for (double v : a) m = std::max(m, v);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double v : a) {
        if (v == -kInf) continue;
        s += std::exp(v - m);
    }
    return m + std::log(s);
}

// sum_i w_i * expm1(x_i), cancellation-free evaluation of E[e^X] - 1 for
// finite-support X. Keeps full precision when E[e^X] is close to 1, which is
// where refutation decisions near the critical eta live.
inline double weighted_expm1_sum(std::span<const double> w, std::span<const double> x) {
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0.0) continue;
        if (x[i] == kInf) return kInf;
        s += w[i] * std::expm1(x[i]);
    }
    return s;
}

struct SlopeFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double stderr_slope = std::numeric_limits<double>::quiet_NaN();
    int points_used = 0;
};

// Least-squares fit of y on x. Entries where either coordinate is non-finite
// are dropped; needs >= 2 surviving points.
inline SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
    SlopeFit out;
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < x.size(); ++i)
        if (std::isfinite(x[i]) && std::isfinite(y[i])) pts.emplace_back(x[i], y[i]);
    out.points_used = static_cast<int>(pts.size());
    if (pts.size() < 2) return out;
    double sx = 0, sy = 0;
    for (auto& [a, b] : pts) { sx += a; sy += b; }
    const double xm = sx / pts.size(), ym = sy / pts.size();
    double sxx = 0, sxy = 0, see = 0;
    for (auto& [a, b] : pts) { sxx += (a - xm) * (a - xm); sxy += (a - xm) * (b - ym); }
    if (sxx == 0) return out;
    out.slope = sxy / sxx;
    out.intercept = ym - out.slope * xm;
    for (auto& [a, b] : pts) {
        const double r = b - (out.intercept + out.slope * a);
        see += r * r;
    }
    if (pts.size() > 2) out.stderr_slope = std::sqrt(see / (pts.size() - 2) / sxx);
    else out.stderr_slope = 0.0;
    return out;
}

}  // namespace fastrates
