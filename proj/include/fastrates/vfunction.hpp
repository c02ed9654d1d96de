#pragma once

// Rate functions v (and their Bernstein-side counterparts u): nonnegative,
// nondecreasing maps on [0, inf), optionally capped. Constant v recovers a
// fixed learning rate; Power(C, alpha) covers the polynomial family.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fastrates/errors.hpp"
#include "fastrates/numeric.hpp"

namespace fastrates {

class VFunction {
public:
    enum class Kind { Constant, Power, Tabulated };

    static VFunction constant(double c) {
        VFunction v;
        v.kind_ = Kind::Constant;
        v.coeff_ = c;
        return v;
    }
    // v(x) = C * x^alpha, optionally capped at `cap`.
    static VFunction power(double C, double alpha, double cap = kInf) {
        VFunction v;
        v.kind_ = Kind::Power;
        v.coeff_ = C;
        v.alpha_ = alpha;
        v.cap_ = cap;
        return v;
    }
    // Monotone piecewise-linear interpolation through (xs, ys).
    static VFunction tabulated(std::vector<double> xs, std::vector<double> ys, double cap = kInf) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw ShapeViolation("tabulated v: need >= 2 knots");
        for (size_t i = 1; i < xs.size(); ++i) {
            if (!(xs[i] > xs[i - 1])) throw ShapeViolation("tabulated v: x knots must increase");
            if (ys[i] + 1e-15 < ys[i - 1]) throw ShapeViolation("tabulated v: must be nondecreasing");
        }
        VFunction v;
        v.kind_ = Kind::Tabulated;
        v.xs_ = std::move(xs);
        v.ys_ = std::move(ys);
        v.cap_ = cap;
        return v;
    }

    double operator()(double x) const {
        double base;
        switch (kind_) {
            case Kind::Constant: base = coeff_; break;
            case Kind::Power: base = coeff_ * std::pow(x, alpha_); break;
            default: base = interp(x); break;
        }
        return std::min(base, cap_);
    }

    Kind kind() const { return kind_; }
    double coeff() const { return coeff_; }
    double alpha() const { return alpha_; }
    double cap() const { return cap_; }

    // sup over [0, hi]; functions here are nondecreasing so it sits at hi.
    double sup_on(double hi) const { return (*this)(hi); }

    // Grid checks for the shape constraints the conversions rely on.
    void require_nondecreasing(double lo, double hi, int pts = 256) const {
        double prev = (*this)(lo);
        for (int i = 1; i <= pts; ++i) {
            const double x = lo + (hi - lo) * i / pts;
            const double y = (*this)(x);
            if (y + 1e-12 < prev) throw ShapeViolation("function must be nondecreasing");
            prev = y;
        }
    }
    void require_slope_nonincreasing(double lo, double hi, int pts = 256) const {
        // u(x)/x nonincreasing on (0, hi].
        double xprev = std::max(lo, hi / pts * 1e-6);
        double prev = (*this)(xprev) / xprev;
        for (int i = 1; i <= pts; ++i) {
            const double x = lo + (hi - lo) * i / pts;
            if (x <= 0) continue;
            const double r = (*this)(x) / x;
            if (r > prev * (1 + 1e-9) + 1e-12) throw ShapeViolation("u(x)/x must be nonincreasing");
            prev = r;
            xprev = x;
        }
    }
    void require_slope_nondecreasing(double lo, double hi, int pts = 256) const {
        // x/v(x) nondecreasing on (0, hi].
        double prev = -kInf;
        for (int i = 1; i <= pts; ++i) {
            const double x = lo + (hi - lo) * i / pts;
            if (x <= 0) continue;
            const double vx = (*this)(x);
            if (!(vx > 0)) throw ShapeViolation("v(x) must be positive for x > 0");
            const double r = x / vx;
            if (r + 1e-12 < prev * (1 - 1e-9)) throw ShapeViolation("x/v(x) must be nondecreasing");
            prev = r;
        }
    }

private:
    double interp(double x) const {
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const size_t i = static_cast<size_t>(it - xs_.begin());
        const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
    }

    Kind kind_ = Kind::Constant;
    double coeff_ = 1.0;
    double alpha_ = 0.0;
    double cap_ = kInf;
    std::vector<double> xs_, ys_;
};

}  // namespace fastrates
