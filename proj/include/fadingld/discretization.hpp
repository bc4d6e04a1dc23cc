#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "model.hpp"

namespace fadingld {

// Integer cell index: three spatial axes then the fading axis.
using CellKey = std::array<std::int64_t, 4>;

// Triadic grid at delta = 3^-m. Spatial centers delta*2r*Z^d inside W, fading centers
// F_o + 2*delta*(F_max - F_min)*Z inside [F_min, F_max]; points go to the nearest center.
class TriadicGrid {
public:
    TriadicGrid(const Window& w, double fmin, double fmax, double fo, int m)
        : window_(w), fmin_(fmin), fmax_(fmax), fo_(fo), m_(m) {
        if (m < 0 || m > 19) throw ParameterError("triadic level must be in [0, 19]");
        if (!(fmin > 0) || fmax < fmin) throw ModelError("fading bounds must satisfy 0 < F_min <= F_max");
        if (fo < fmin || fo > fmax) throw ModelError("anchor fading must lie in [F_min, F_max]");
        std::int64_t p = 1;
        for (int i = 0; i < m; ++i) p *= 3;
        pow3_ = p;
        delta_ = 1.0 / static_cast<double>(p);
        hx_ = 2.0 * w.r() * delta_;
        hu_ = 2.0 * delta_ * (fmax - fmin);
        kx_ = (p - 1) / 2;
        if (hu_ > 0) {
            ku_lo_ = -static_cast<std::int64_t>(std::floor((fo - fmin) / hu_ * (1 + 1e-14)));
            ku_hi_ = static_cast<std::int64_t>(std::floor((fmax - fo) / hu_ * (1 + 1e-14)));
        }
    }

    static TriadicGrid for_model(const NetworkModel& model, int m) {
        return TriadicGrid(model.window(), model.fmin(), model.fmax(), model.base_fading(), m);
    }

    int level() const { return m_; }
    double delta() const { return delta_; }
    double spatial_step() const { return hx_; }
    double fading_step() const { return hu_; }
    const Window& window() const { return window_; }
    double fmin() const { return fmin_; }
    double fmax() const { return fmax_; }
    double anchor() const { return fo_; }
    std::int64_t spatial_index_bound() const { return kx_; }
    std::pair<std::int64_t, std::int64_t> fading_index_range() const { return {ku_lo_, ku_hi_}; }

    bool same_as(const TriadicGrid& o) const {
        return m_ == o.m_ && fmin_ == o.fmin_ && fmax_ == o.fmax_ && fo_ == o.fo_ &&
               window_.shape() == o.window_.shape() && window_.dim() == o.window_.dim() && window_.r() == o.window_.r();
    }

    MarkedPoint center(const CellKey& k) const {
        MarkedPoint c;
        for (int a = 0; a < window_.dim(); ++a) c.x[a] = static_cast<double>(k[a]) * hx_;
        c.u = fo_ + static_cast<double>(k[3]) * hu_;
        return c;
    }

    CellKey key_of(const MarkedPoint& p) const {
        if (!window_.contains(p.x, 1e-12) || p.u < fmin_ * (1 - 1e-12) || p.u > fmax_ * (1 + 1e-12))
            throw DomainError("point outside the marked window");
        CellKey k{0, 0, 0, 0};
        for (int a = 0; a < window_.dim(); ++a) k[a] = nearest(p.x[a] / hx_, -kx_, kx_);
        if (hu_ > 0) k[3] = nearest((p.u - fo_) / hu_, ku_lo_, ku_hi_);
        if (window_.shape() == Window::Shape::Disk2D && !inside_disk(k)) k = nearest_in_disk(p, k);
        return k;
    }

    MarkedPoint discretize(const MarkedPoint& p) const { return center(key_of(p)); }

private:
    // Nearest integer with ties to the smaller one, clipped to [lo, hi].
    static std::int64_t nearest(double t, std::int64_t lo, std::int64_t hi) {
        double c = std::ceil(t - 0.5);
        if (c < static_cast<double>(lo)) return lo;
        if (c > static_cast<double>(hi)) return hi;
        return static_cast<std::int64_t>(c);
    }

    bool inside_disk(const CellKey& k) const {
        double x = k[0] * hx_, y = k[1] * hx_;
        return x * x + y * y <= window_.r() * window_.r() * (1 + 1e-12);
    }

    // Nearest in-disk center around k; lexicographic order breaks ties.
    CellKey nearest_in_disk(const MarkedPoint& p, CellKey k) const {
        CellKey best = k;
        double bd = std::numeric_limits<double>::infinity();
        for (std::int64_t i = k[0] - 2; i <= k[0] + 2; ++i)
            for (std::int64_t j = k[1] - 2; j <= k[1] + 2; ++j) {
                CellKey c{i, j, 0, k[3]};
                if (!inside_disk(c)) continue;
                double dx = p.x[0] - i * hx_, dy = p.x[1] - j * hx_;
                double d = dx * dx + dy * dy;
                if (d < bd || (d == bd && c < best)) {
                    bd = d;
                    best = c;
                }
            }
        return best;
    }

    Window window_;
    double fmin_, fmax_, fo_;
    int m_;
    std::int64_t pow3_ = 1;
    double delta_ = 1.0, hx_ = 0.0, hu_ = 0.0;
    std::int64_t kx_ = 0, ku_lo_ = 0, ku_hi_ = 0;
};

// nu o rho'^{-1}: masses keyed by cell index (ordered, so iteration is deterministic).
class DiscretizedMeasure {
public:
    explicit DiscretizedMeasure(TriadicGrid grid) : grid_(std::move(grid)) {}

    const TriadicGrid& grid() const { return grid_; }
    const std::map<CellKey, double>& masses() const { return masses_; }

    void add(const CellKey& k, double w) {
        if (!(w >= 0)) throw ModelError("cell masses must be nonnegative");
        masses_[k] += w;
    }
    double mass(const CellKey& k) const {
        auto it = masses_.find(k);
        return it == masses_.end() ? 0.0 : it->second;
    }
    double total_mass() const {
        CompensatedSum s;
        for (const auto& [k, w] : masses_) s += w;
        return s.value();
    }

    DiscretizedMeasure scaled(double a) const {
        DiscretizedMeasure d = *this;
        for (auto& [k, w] : d.masses_) w *= a;
        return d;
    }

    // Grid marked measure with one entry per positive cell, in key order.
    MarkedMeasure to_marked() const {
        MarkedMeasure m(grid_.window().dim(), MarkedMeasure::Repr::Grid);
        for (const auto& [k, w] : masses_) {
            if (!(w > 0)) continue;
            auto c = grid_.center(k);
            m.add(c.x, c.u, w);
        }
        return m;
    }

private:
    TriadicGrid grid_;
    std::map<CellKey, double> masses_;
};

inline MarkedPoint discretize_point(const TriadicGrid& g, const MarkedPoint& p) { return g.discretize(p); }

// Atoms and grid cells both move their mass to the cell holding their location.
inline DiscretizedMeasure pushforward(const TriadicGrid& g, const MarkedMeasure& nu) {
    DiscretizedMeasure d(g);
    for (const auto& a : nu.points()) {
        if (a.w == 0) continue;
        d.add(g.key_of({a.x, a.u}), a.w);
    }
    return d;
}

// Exact-for-box pushforward of mu' = mu (x) zeta onto the triadic cells.
// Disk windows use a Gauss-Legendre subsample of each cell.
inline DiscretizedMeasure discretize_product_intensity(const TriadicGrid& g, const NetworkModel& model) {
    const Window& w = g.window();
    DiscretizedMeasure d(g);
    // fading cell masses; cell k covers the Voronoi interval of its center clipped to the support
    auto [klo, khi] = g.fading_index_range();
    std::vector<std::pair<std::int64_t, double>> fm;
    const FadingLaw& law = model.fading();
    if (g.fading_step() == 0) {
        fm.emplace_back(0, 1.0);
    } else if (law.form() == FadingLaw::Form::DiscreteAtoms) {
        std::map<std::int64_t, double> acc;
        for (std::size_t i = 0; i < law.atom_values().size(); ++i)
            acc[g.key_of({origin, law.atom_values()[i]})[3]] += law.atom_weights()[i];
        for (auto& kv : acc) fm.push_back(kv);
    } else {
        for (std::int64_t k = klo; k <= khi; ++k) {
            double c = g.anchor() + k * g.fading_step();
            double lo = k == klo ? g.fmin() : c - 0.5 * g.fading_step();
            double hi = k == khi ? g.fmax() : c + 0.5 * g.fading_step();
            double m = law.cdf(hi) - law.cdf(lo);
            if (m > 0) fm.emplace_back(k, m);
        }
    }
    const double M = model.intensity().total_mass();
    const std::int64_t K = g.spatial_index_bound();
    const double h = g.spatial_step();
    auto put = [&](CellKey sk, double ms) {
        if (!(ms > 0)) return;
        for (auto [kf, mf] : fm) {
            CellKey key = sk;
            key[3] = kf;
            d.add(key, ms * mf);
        }
    };
    if (w.shape() == Window::Shape::Box) {
        // cells tile the box exactly: every spatial cell has volume h^d
        int dim = w.dim();
        std::int64_t n = 2 * K + 1, count = 1;
        for (int a = 0; a < dim; ++a) count *= n;
        double ms = M / static_cast<double>(count);
        for (std::int64_t idx = 0; idx < count; ++idx) {
            CellKey sk{0, 0, 0, 0};
            std::int64_t rest = idx;
            for (int a = 0; a < dim; ++a) {
                sk[a] = rest % n - K;
                rest /= n;
            }
            put(sk, ms);
        }
        return d;
    }
    PiecewiseLinear q = model.intensity().radial_density(w);
    const GaussRule& gr = GaussRule::get();
    std::map<CellKey, double> spatial;
    for (std::int64_t i = -K; i <= K; ++i)
        for (std::int64_t j = -K; j <= K; ++j) {
            double cx = i * h, cy = j * h;
            for (int a = 0; a < GaussRule::order; ++a)
                for (int b = 0; b < GaussRule::order; ++b) {
                    double x = cx + 0.5 * h * gr.x[a], y = cy + 0.5 * h * gr.x[b];
                    double s = std::hypot(x, y);
                    if (s > w.r() || s == 0) continue;
                    double dens = q(s) / (2.0 * std::numbers::pi * s);
                    CellKey sk = g.key_of({Point{x, y, 0.0}, g.anchor()});
                    sk[3] = 0;
                    spatial[sk] += dens * 0.25 * h * h * gr.w[a] * gr.w[b];
                }
        }
    // boundary cells are cut by the circle, so the subsample is off by O(h^2); restore the exact mass
    CompensatedSum tot;
    for (auto& [sk, ms] : spatial) tot += ms;
    const double fix = tot.value() > 0 ? M / tot.value() : 1.0;
    for (auto& [sk, ms] : spatial) put(sk, ms * fix);
    return d;
}

// Smallest positive cell mass.
inline double kappa_delta(const DiscretizedMeasure& mu) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [k, w] : mu.masses())
        if (w > 0) best = std::min(best, w);
    if (!std::isfinite(best)) throw ParameterError("discretized measure has no positive cell");
    return best;
}

}  // namespace fadingld
