#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "discretization.hpp"
#include "errors.hpp"
#include "numerics.hpp"

namespace fadingld {

// Relative entropy value in [0, inf]; infinity is a flag, never a large float.
struct EntropyValue {
    double value = 0.0;
    bool finite = true;

    static EntropyValue infinite() { return {std::numeric_limits<double>::infinity(), false}; }
    bool is_infinite() const { return !finite; }
};

// h(a|b) = a log(a/b) - a + b with 0 log 0 = 0; infinite for a > 0 = b.
inline double h_cell(double a, double b) {
    if (a < 0 || b < 0) throw DomainError("relative entropy of negative masses");
    if (a == 0) return b;
    if (b == 0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b) - a + b;
}

inline EntropyValue rel_entropy_cells(std::span<const double> nu, std::span<const double> mu) {
    if (nu.size() != mu.size()) throw ParameterError("cell vectors differ in length");
    CompensatedSum s;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        double h = h_cell(nu[i], mu[i]);
        if (std::isinf(h)) return EntropyValue::infinite();
        s += h;
    }
    return {std::max(0.0, s.value()), true};
}

inline EntropyValue rel_entropy_discrete(const DiscretizedMeasure& nu, const DiscretizedMeasure& mu) {
    if (!nu.grid().same_as(mu.grid())) throw ParameterError("relative entropy needs a shared grid");
    CompensatedSum s;
    auto a = nu.masses().begin(), ae = nu.masses().end();
    auto b = mu.masses().begin(), be = mu.masses().end();
    // merge walk over the union of keys
    while (a != ae || b != be) {
        double x = 0, y = 0;
        if (b == be || (a != ae && a->first < b->first)) {
            x = a->second;
            ++a;
        } else if (a == ae || b->first < a->first) {
            y = b->second;
            ++b;
        } else {
            x = a->second;
            y = b->second;
            ++a;
            ++b;
        }
        double h = h_cell(x, y);
        if (std::isinf(h)) return EntropyValue::infinite();
        s += h;
    }
    return {std::max(0.0, s.value()), true};
}

// Integral of f log f - f + 1 against the cells of mu' (f = d nu / d mu' per cell).
inline EntropyValue rel_entropy_density(std::span<const double> f, const MarkedMeasure& mu_prime) {
    const auto& pts = mu_prime.points();
    if (f.size() != pts.size()) throw ParameterError("density table does not match the grid");
    CompensatedSum s;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0 || std::isnan(f[i])) throw DomainError("density must be nonnegative");
        double v = f[i] == 0 ? 1.0 : f[i] * std::log(f[i]) - f[i] + 1.0;
        s += pts[i].w * v;
    }
    return {std::max(0.0, s.value()), true};
}

// Cramer rate of a Poisson(m) count observed at y.
inline double poisson_rate(double y, double m) {
    if (!(m > 0)) throw ParameterError("poisson rate needs a positive mean");
    if (y < 0) throw DomainError("poisson rate at a negative count");
    if (y == 0) return m;
    return y * std::log(y / m) - y + m;
}

}  // namespace fadingld
