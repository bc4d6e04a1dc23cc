#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "errors.hpp"

namespace fadingld {

// Neumaier compensated summation; deterministic for a fixed input order.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// 16-point Gauss-Legendre rule on [-1, 1], expanded from the symmetric half stored by Boost.
struct GaussRule {
    static constexpr int order = 16;
    std::array<double, order> x{};
    std::array<double, order> w{};

    static const GaussRule& get() {
        static const GaussRule rule = [] {
            GaussRule r;
            using G = boost::math::quadrature::gauss<double, order>;
            const auto& a = G::abscissa();
            const auto& wt = G::weights();
            int k = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                r.x[k] = -a[i];
                r.w[k] = wt[i];
                ++k;
                r.x[k] = a[i];
                r.w[k] = wt[i];
                ++k;
            }
            return r;
        }();
        return rule;
    }
};

// Appends Gauss-Legendre nodes for [a, b] split into `panels` equal pieces.
inline void append_gauss_nodes(double a, double b, int panels, std::vector<double>& xs,
                               std::vector<double>& ws) {
    if (!(b > a)) return;
    const GaussRule& g = GaussRule::get();
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        double mid = lo + 0.5 * h;
        for (int k = 0; k < GaussRule::order; ++k) {
            xs.push_back(mid + 0.5 * h * g.x[k]);
            ws.push_back(0.5 * h * g.w[k]);
        }
    }
}

// Gauss-Legendre nodes over [a, b] with every listed breakpoint inside (a, b) honored.
inline void append_gauss_nodes_split(double a, double b, std::vector<double> breaks, int panels,
                                     std::vector<double>& xs, std::vector<double>& ws) {
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    double prev = a;
    for (double t : breaks) {
        if (t <= prev) continue;
        if (t > b) break;
        append_gauss_nodes(prev, t, panels, xs, ws);
        prev = t;
    }
}

template <class F>
double integrate(F&& f, double a, double b, const std::vector<double>& breaks = {}, int panels = 4) {
    std::vector<double> xs, ws;
    append_gauss_nodes_split(a, b, breaks, panels, xs, ws);
    CompensatedSum s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * f(xs[i]);
    return s.value();
}

// Root of a monotone function on [lo, hi] given opposite signs at the ends.
template <class F>
double bisect(F&& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Linear interpolation through (x_k, y_k), constant beyond the ends.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
        if (xs_.size() < 2 || xs_.size() != ys_.size())
            throw ModelError("table needs at least two (x, y) samples of equal length");
        for (std::size_t i = 1; i < xs_.size(); ++i)
            if (!(xs_[i] > xs_[i - 1])) throw ModelError("table abscissae must be strictly increasing");
        for (double y : ys_)
            if (!std::isfinite(y)) throw ModelError("table values must be finite");
        cum_.assign(xs_.size(), 0.0);
        for (std::size_t i = 1; i < xs_.size(); ++i)
            cum_[i] = cum_[i - 1] + 0.5 * (ys_[i] + ys_[i - 1]) * (xs_[i] - xs_[i - 1]);
    }

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    double front_x() const { return xs_.front(); }
    double back_x() const { return xs_.back(); }

    double operator()(double x) const {
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        std::size_t i = segment(x);
        double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
        return ys_[i] + t * (ys_[i + 1] - ys_[i]);
    }

    // Integral from front_x() to x (x clamped to the table range).
    double cumulative(double x) const {
        if (x <= xs_.front()) return 0.0;
        if (x >= xs_.back()) return cum_.back();
        std::size_t i = segment(x);
        double h = x - xs_[i];
        double yx = (*this)(x);
        return cum_[i] + 0.5 * (ys_[i] + yx) * h;
    }
    double total() const { return cum_.back(); }

    // Smallest x with cumulative(x) = target, assuming nonnegative values.
    double inverse_cumulative(double target) const {
        if (target <= 0.0) return xs_.front();
        if (target >= cum_.back()) return xs_.back();
        std::size_t i = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), target) - cum_.begin());
        i = std::min(std::max<std::size_t>(i, 1), cum_.size() - 1) - 1;
        double rem = target - cum_[i];
        double y0 = ys_[i];
        double slope = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
        double h;
        if (std::abs(slope) < 1e-300) {
            h = y0 > 0 ? rem / y0 : 0.0;
        } else {
            // 0.5*slope*h^2 + y0*h - rem = 0, stable root
            double disc = std::max(0.0, y0 * y0 + 2.0 * slope * rem);
            h = 2.0 * rem / (y0 + std::sqrt(disc));
        }
        return std::clamp(xs_[i] + h, xs_[i], xs_[i + 1]);
    }

    double max_abs_slope() const {
        double m = 0.0;
        for (std::size_t i = 1; i < xs_.size(); ++i)
            m = std::max(m, std::abs((ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1])));
        return m;
    }

    bool nonincreasing() const {
        for (std::size_t i = 1; i < ys_.size(); ++i)
            if (ys_[i] > ys_[i - 1]) return false;
        return true;
    }
    bool nondecreasing() const {
        for (std::size_t i = 1; i < ys_.size(); ++i)
            if (ys_[i] < ys_[i - 1]) return false;
        return true;
    }

private:
    std::size_t segment(double x) const {
        std::size_t i = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
        return std::min(i, xs_.size() - 1) - 1;
    }

    std::vector<double> xs_, ys_, cum_;
};

}  // namespace fadingld
