#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "model.hpp"

namespace fadingld {

// Counter-based SplitMix64: output k of stream (seed, stream) is mix(key + k * gamma),
// so any replication can be regenerated independently of the others.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    static constexpr const char* name = "splitmix64-ctr";

    explicit SplitMix64(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_(mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + gamma * ++counter_); }

    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t gamma = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class FadingKernel {
public:
    enum class Form { Iid, CountableAreas, ContinuousKernel };

    struct Area {
        std::function<bool(const Point&)> contains;
        FadingLaw law;
    };

    static FadingKernel iid(FadingLaw law) {
        FadingKernel k(Form::Iid);
        k.laws_.push_back(std::move(law));
        k.finish();
        return k;
    }

    // Regions are tried in order; the first one containing x supplies the law.
    static FadingKernel areas(std::vector<Area> regions) {
        if (regions.empty()) throw ModelError("area kernel needs at least one region");
        FadingKernel k(Form::CountableAreas);
        for (auto& a : regions) {
            k.regions_.push_back(std::move(a.contains));
            k.laws_.push_back(std::move(a.law));
        }
        k.finish();
        return k;
    }

    // Annuli {s <= radii[0]}, {radii[0] < s <= radii[1]}, ... around the origin.
    static FadingKernel annuli(const std::vector<double>& radii, std::vector<FadingLaw> laws) {
        if (radii.size() != laws.size()) throw ModelError("one law per annulus");
        std::vector<Area> regions;
        double inner = -1.0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            double lo = inner, hi = radii[i];
            regions.push_back({[lo, hi](const Point& x) {
                                   double s = norm(x);
                                   return s > lo && s <= hi;
                               },
                               std::move(laws[i])});
            inner = hi;
        }
        return areas(std::move(regions));
    }

    // f(x, u) tabulated: row i is the density at nodes[i] over the common fading grid u.
    static FadingKernel continuous(std::vector<Point> nodes, const std::vector<double>& u,
                                   const std::vector<std::vector<double>>& f) {
        if (nodes.empty() || nodes.size() != f.size()) throw ModelError("one density row per kernel node");
        FadingKernel k(Form::ContinuousKernel);
        for (const auto& row : f) {
            PiecewiseLinear t(u, row);
            if (std::abs(t.total() - 1.0) > 1e-8) throw ModelError("kernel row must integrate to 1");
            k.laws_.push_back(FadingLaw::density(u, row, true));
        }
        k.nodes_ = std::move(nodes);
        k.finish();
        return k;
    }

    // F^x = k(x) F_0 sampled at the given nodes.
    template <class Scale>
    static FadingKernel scaled(const FadingLaw& base, Scale&& scale, std::vector<Point> nodes) {
        if (nodes.empty()) throw ModelError("scaled kernel needs nodes");
        FadingKernel k(Form::ContinuousKernel);
        for (const auto& x : nodes) k.laws_.push_back(base.scaled(scale(x)));
        k.nodes_ = std::move(nodes);
        k.finish();
        return k;
    }

    Form form() const { return form_; }
    double fmin() const { return fmin_; }
    double fmax() const { return fmax_; }
    std::size_t law_count() const { return laws_.size(); }
    const FadingLaw& law(std::size_t i) const { return laws_.at(i); }

    std::size_t law_index(const Point& x) const {
        switch (form_) {
            case Form::Iid:
                return 0;
            case Form::CountableAreas:
                for (std::size_t i = 0; i < regions_.size(); ++i)
                    if (regions_[i](x)) return i;
                throw ModelError("position not covered by any fading area");
            case Form::ContinuousKernel: {
                std::size_t best = 0;
                double bd = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < nodes_.size(); ++i) {
                    double d = distance(nodes_[i], x);
                    if (d < bd) {
                        bd = d;
                        best = i;
                    }
                }
                return best;
            }
        }
        return 0;
    }
    const FadingLaw& law_at(const Point& x) const { return laws_[law_index(x)]; }

    void check_within(double lo, double hi) const {
        if (fmin_ < lo * (1 - 1e-12) || fmax_ > hi * (1 + 1e-12))
            throw ModelError("fading kernel support leaves [F_min, F_max]");
    }

private:
    explicit FadingKernel(Form f) : form_(f) {}
    void finish() {
        fmin_ = std::numeric_limits<double>::infinity();
        fmax_ = 0.0;
        for (const auto& l : laws_) {
            fmin_ = std::min(fmin_, l.fmin());
            fmax_ = std::max(fmax_, l.fmax());
        }
    }

    Form form_;
    std::vector<FadingLaw> laws_;
    std::vector<std::function<bool(const Point&)>> regions_;
    std::vector<Point> nodes_;
    double fmin_ = 0, fmax_ = 0;
};

struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string generator = SplitMix64::name;
};

struct Sample {
    MarkedMeasure users;  // unit weights
    double lambda = 1.0;
    double base_fading_draw = 0.0;
    SeedRecord seed;

    std::size_t count() const { return users.size(); }
};

template <class Rng>
Point draw_position(const NetworkModel& model, const PiecewiseLinear* radial, Rng& rng) {
    const Window& w = model.window();
    Point x{};
    if (w.shape() == Window::Shape::Box) {
        for (int k = 0; k < w.dim(); ++k) x[k] = w.r() * (2.0 * uniform01(rng) - 1.0);
        return x;
    }
    double s;
    if (radial)
        s = radial->inverse_cumulative(uniform01(rng) * radial->total());
    else
        s = w.r() * std::sqrt(uniform01(rng));
    double th = 2.0 * std::numbers::pi * uniform01(rng);
    x[0] = s * std::cos(th);
    x[1] = s * std::sin(th);
    return x;
}

// Draws N ~ Poisson(lambda mu(W)) users with kernel fadings into `out` (unit weights).
template <class Rng>
void draw_users(const NetworkModel& model, const FadingKernel& kernel, double lambda, Rng& rng,
                std::vector<MarkedAtom>& out, const PiecewiseLinear* radial = nullptr) {
    out.clear();
    double mean = lambda * model.intensity().total_mass();
    if (!(mean > 0)) return;
    std::poisson_distribution<long long> pois(mean);
    long long n = pois(rng);
    out.reserve(static_cast<std::size_t>(n));
    bool iid = kernel.form() == FadingKernel::Form::Iid;
    for (long long i = 0; i < n; ++i) {
        MarkedAtom a;
        a.x = draw_position(model, radial, rng);
        const FadingLaw& law = iid ? kernel.law(0) : kernel.law_at(a.x);
        a.u = law.quantile(uniform01(rng));
        a.w = 1.0;
        out.push_back(a);
    }
}

inline Sample sample_ppp(const NetworkModel& model, const FadingKernel& kernel, double lambda, std::uint64_t seed,
                         std::uint64_t stream = 0) {
    if (!(lambda > 0)) throw ParameterError("lambda must be positive");
    kernel.check_within(model.fmin(), model.fmax());
    SplitMix64 rng(seed, stream);
    std::optional<PiecewiseLinear> radial;
    if (model.intensity().form() == SpatialIntensity::Form::Radial2D)
        radial = model.intensity().radial_density(model.window());
    std::vector<MarkedAtom> atoms;
    draw_users(model, kernel, lambda, rng, atoms, radial ? &*radial : nullptr);
    Sample s;
    s.users = MarkedMeasure::from_atoms(model.dim(), std::move(atoms));
    s.lambda = lambda;
    s.seed = {seed, stream, SplitMix64::name};
    if (model.base().is_random())
        s.base_fading_draw = model.base().law().quantile(uniform01(rng));
    else
        s.base_fading_draw = model.base_fading();
    return s;
}

inline Sample sample_ppp(const NetworkModel& model, double lambda, std::uint64_t seed, std::uint64_t stream = 0) {
    return sample_ppp(model, FadingKernel::iid(model.fading()), lambda, seed, stream);
}

// L_lambda = (1/lambda) sum of unit masses.
inline MarkedMeasure empirical_measure(const Sample& s) {
    MarkedMeasure m(s.users.dim(), MarkedMeasure::Repr::Atoms);
    m.reserve(s.users.size());
    for (const auto& a : s.users.points()) m.add(a.x, a.u, 1.0 / s.lambda);
    return m;
}

}  // namespace fadingld
