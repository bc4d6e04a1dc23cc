#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace fadingld {

// Positions live in R^3; unused trailing coordinates stay zero.
using Point = std::array<double, 3>;

inline double norm(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

inline double distance(const Point& a, const Point& b) {
    double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

inline constexpr Point origin{0.0, 0.0, 0.0};

// A position with a fading mark.
struct MarkedPoint {
    Point x{};
    double u = 0.0;
};

class Window {
public:
    enum class Shape { Box, Disk2D };

    static Window box(int d, double r) {
        if (d < 1 || d > 3) throw ModelError("box dimension must be 1, 2 or 3");
        if (!(r > 0)) throw ModelError("window half-width must be positive");
        return Window(Shape::Box, d, r);
    }
    static Window disk(double r) {
        if (!(r > 0)) throw ModelError("disk radius must be positive");
        return Window(Shape::Disk2D, 2, r);
    }

    Shape shape() const { return shape_; }
    int dim() const { return dim_; }
    double r() const { return r_; }

    double diameter() const { return shape_ == Shape::Box ? 2.0 * r_ * std::sqrt(double(dim_)) : 2.0 * r_; }
    // Largest distance from the origin to a point of W.
    double max_radius() const { return shape_ == Shape::Box ? r_ * std::sqrt(double(dim_)) : r_; }
    double volume() const {
        return shape_ == Shape::Box ? std::pow(2.0 * r_, dim_) : std::numbers::pi * r_ * r_;
    }

    bool contains(const Point& x, double tol = 1e-12) const {
        for (int k = dim_; k < 3; ++k)
            if (x[k] != 0.0) return false;
        if (shape_ == Shape::Disk2D) return norm(x) <= r_ * (1.0 + tol);
        for (int k = 0; k < dim_; ++k)
            if (std::abs(x[k]) > r_ * (1.0 + tol)) return false;
        return true;
    }

private:
    Window(Shape s, int d, double r) : shape_(s), dim_(d), r_(r) {}
    Shape shape_;
    int dim_;
    double r_;
};

class PathLoss {
public:
    enum class Form { TruncatedPower, Constant, Tabulated };

    // l(s) = min{cap, s^-exponent}
    static PathLoss truncated_power(double cap, double exponent) {
        if (!(cap > 0) || !(exponent > 0)) throw ModelError("truncated power needs cap > 0 and exponent > 0");
        PathLoss p(Form::TruncatedPower);
        p.cap_ = cap;
        p.exponent_ = exponent;
        return p;
    }
    static PathLoss constant(double k) {
        if (!(k > 0)) throw ModelError("constant path-loss must be positive");
        PathLoss p(Form::Constant);
        p.cap_ = k;
        return p;
    }
    // Monotone samples starting at s = 0; held constant past the last sample.
    static PathLoss tabulated(std::vector<double> s, std::vector<double> values) {
        PathLoss p(Form::Tabulated);
        p.table_ = PiecewiseLinear(std::move(s), std::move(values));
        if (p.table_.front_x() != 0.0) throw ModelError("path-loss table must start at distance 0");
        if (!p.table_.nonincreasing() && !p.table_.nondecreasing())
            throw ModelError("path-loss table must be monotone");
        for (double v : p.table_.ys())
            if (!(v > 0)) throw ModelError("path-loss values must be positive");
        return p;
    }

    Form form() const { return form_; }
    double cap() const { return cap_; }
    double exponent() const { return exponent_; }
    const PiecewiseLinear& table() const { return table_; }

    double operator()(double s) const {
        if (s < 0 || std::isnan(s)) throw DomainError("path-loss evaluated at negative distance");
        return value(s);
    }

    // Unchecked evaluation for hot loops; s must be nonnegative.
    double value(double s) const {
        switch (form_) {
            case Form::TruncatedPower:
                if (s <= knee()) return cap_;
                return exponent_ == 4.0 ? 1.0 / ((s * s) * (s * s)) : std::pow(s, -exponent_);
            case Form::Constant:
                return cap_;
            case Form::Tabulated:
                return table_(s);
        }
        return 0.0;
    }

    // Distance at which the cap stops binding.
    double knee() const { return form_ == Form::TruncatedPower ? std::pow(cap_, -1.0 / exponent_) : 0.0; }

    double lipschitz() const {
        switch (form_) {
            case Form::TruncatedPower:
                return exponent_ * std::pow(knee(), -exponent_ - 1.0);
            case Form::Constant:
                return 0.0;
            case Form::Tabulated:
                return table_.max_abs_slope();
        }
        return 0.0;
    }

    std::vector<double> breakpoints() const {
        if (form_ == Form::TruncatedPower) return {knee()};
        if (form_ == Form::Tabulated) return table_.xs();
        return {};
    }

    bool nonincreasing() const { return form_ != Form::Tabulated || table_.nonincreasing(); }

    // (min, max) of l over [a, b].
    std::pair<double, double> range_on(double a, double b) const {
        double lo = value(a), hi = lo;
        auto take = [&](double s) {
            double v = value(s);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        };
        take(b);
        for (double s : breakpoints())
            if (s > a && s < b) take(s);
        return {lo, hi};
    }

private:
    explicit PathLoss(Form f) : form_(f) {}
    Form form_;
    double cap_ = 1.0;
    double exponent_ = 1.0;
    PiecewiseLinear table_;
};

inline double eval_path_loss(const PathLoss& pl, double s) { return pl(s); }

// (l_min, l_max) over all distances realized inside W.
inline std::pair<double, double> extremal_path_loss(const PathLoss& pl, const Window& w) {
    return pl.range_on(0.0, w.diameter());
}

class FadingLaw {
public:
    enum class Form { Uniform, DiscreteAtoms, TruncatedDensity };

    static FadingLaw uniform(double a, double b) {
        if (!(a > 0) || !(b >= a) || !std::isfinite(b)) throw ModelError("uniform fading needs 0 < a <= b < inf");
        if (a == b) return atoms({a}, {1.0});
        FadingLaw f(Form::Uniform);
        f.lo_ = a;
        f.hi_ = b;
        return f;
    }

    static FadingLaw atoms(std::vector<double> values, std::vector<double> weights) {
        if (values.empty() || values.size() != weights.size())
            throw ModelError("atoms need matching nonempty value and weight lists");
        std::vector<std::size_t> idx(values.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return values[i] < values[j]; });
        FadingLaw f(Form::DiscreteAtoms);
        double total = 0.0;
        for (auto i : idx) {
            if (!(values[i] > 0) || !std::isfinite(values[i])) throw ModelError("fading atoms must be positive");
            if (!(weights[i] >= 0)) throw ModelError("fading weights must be nonnegative");
            if (weights[i] == 0) continue;
            f.values_.push_back(values[i]);
            f.weights_.push_back(weights[i]);
            total += weights[i];
        }
        if (std::abs(total - 1.0) > 1e-10) throw ModelError("fading weights must sum to 1");
        f.lo_ = f.values_.front();
        f.hi_ = f.values_.back();
        return f;
    }

    // Tabulated density, linear between samples; the support is the table range.
    static FadingLaw density(std::vector<double> u, std::vector<double> f, bool normalize = true) {
        FadingLaw law(Form::TruncatedDensity);
        for (double v : f)
            if (!(v >= 0)) throw ModelError("fading density must be nonnegative");
        PiecewiseLinear t(u, f);
        double mass = t.total();
        if (!(mass > 0)) throw ModelError("fading density has zero mass");
        if (normalize) {
            for (double& v : f) v /= mass;
            t = PiecewiseLinear(std::move(u), std::move(f));
        } else if (std::abs(mass - 1.0) > 1e-10) {
            throw ModelError("fading density must integrate to 1");
        }
        law.table_ = std::move(t);
        law.lo_ = law.table_.front_x();
        law.hi_ = law.table_.back_x();
        if (!(law.lo_ > 0)) throw ModelError("fading support must be bounded away from zero");
        return law;
    }

    Form form() const { return form_; }
    double fmin() const { return lo_; }
    double fmax() const { return hi_; }
    bool continuous() const { return form_ != Form::DiscreteAtoms; }
    const std::vector<double>& atom_values() const { return values_; }
    const std::vector<double>& atom_weights() const { return weights_; }

    double mean() const {
        switch (form_) {
            case Form::Uniform:
                return 0.5 * (lo_ + hi_);
            case Form::DiscreteAtoms: {
                CompensatedSum s;
                for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * weights_[i];
                return s.value();
            }
            case Form::TruncatedDensity:
                return integrate([&](double u) { return u * table_(u); }, lo_, hi_, table_.xs(), 1);
        }
        return 0.0;
    }

    // P(F <= u)
    double cdf(double u) const {
        if (u < lo_) return 0.0;
        if (u >= hi_) return 1.0;
        switch (form_) {
            case Form::Uniform:
                return (u - lo_) / (hi_ - lo_);
            case Form::DiscreteAtoms: {
                double s = 0.0;
                for (std::size_t i = 0; i < values_.size() && values_[i] <= u; ++i) s += weights_[i];
                return std::min(s, 1.0);
            }
            case Form::TruncatedDensity:
                return std::min(table_.cumulative(u), 1.0);
        }
        return 0.0;
    }

    // P(F < u)
    double cdf_below(double u) const {
        if (form_ != Form::DiscreteAtoms) return cdf(u);
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size() && values_[i] < u; ++i) s += weights_[i];
        return std::min(s, 1.0);
    }

    double quantile(double p) const {
        p = std::clamp(p, 0.0, 1.0);
        switch (form_) {
            case Form::Uniform:
                return lo_ + p * (hi_ - lo_);
            case Form::DiscreteAtoms: {
                double s = 0.0;
                for (std::size_t i = 0; i < values_.size(); ++i) {
                    s += weights_[i];
                    if (p <= s) return values_[i];
                }
                return values_.back();
            }
            case Form::TruncatedDensity:
                return table_.inverse_cumulative(p);
        }
        return lo_;
    }

    double pdf(double u) const {
        if (form_ == Form::DiscreteAtoms) throw ModelError("discrete fading law has no density");
        if (u < lo_ || u > hi_) return 0.0;
        if (form_ == Form::Uniform) return 1.0 / (hi_ - lo_);
        return table_(u);
    }

    std::vector<double> breakpoints() const {
        if (form_ == Form::TruncatedDensity) return table_.xs();
        return {};
    }

    // Law of k * F.
    FadingLaw scaled(double k) const {
        if (!(k > 0)) throw ModelError("fading scale must be positive");
        switch (form_) {
            case Form::Uniform:
                return uniform(k * lo_, k * hi_);
            case Form::DiscreteAtoms: {
                std::vector<double> v = values_;
                for (double& x : v) x *= k;
                return atoms(v, weights_);
            }
            case Form::TruncatedDensity: {
                std::vector<double> u = table_.xs(), f = table_.ys();
                for (double& x : u) x *= k;
                return density(u, f, true);
            }
        }
        return *this;
    }

private:
    explicit FadingLaw(Form f) : form_(f) {}
    Form form_;
    double lo_ = 1.0, hi_ = 1.0;
    std::vector<double> values_, weights_;
    PiecewiseLinear table_;
};

// QoS map g: nondecreasing, strictly increasing on [0, rho_plus), flat at c_plus afterwards.
class QosFunction {
public:
    enum class Form { TruncatedIdentity, Tabulated };

    static QosFunction truncated_identity(double k) {
        if (!(k > 0)) throw ModelError("QoS plateau must be positive");
        QosFunction q(Form::TruncatedIdentity);
        q.rho_ = q.cplus_ = k;
        return q;
    }
    // Samples (x_k, g_k) from x_0 = 0, strictly increasing; the last sample starts the plateau.
    static QosFunction tabulated(std::vector<double> x, std::vector<double> g) {
        QosFunction q(Form::Tabulated);
        q.table_ = PiecewiseLinear(std::move(x), std::move(g));
        if (q.table_.front_x() != 0.0) throw ModelError("QoS table must start at 0");
        const auto& ys = q.table_.ys();
        for (std::size_t i = 1; i < ys.size(); ++i)
            if (!(ys[i] > ys[i - 1])) throw ModelError("QoS table must be strictly increasing below its plateau");
        if (ys.front() < 0) throw ModelError("QoS values must be nonnegative");
        q.rho_ = q.table_.back_x();
        q.cplus_ = ys.back();
        return q;
    }

    Form form() const { return form_; }
    double rho_plus() const { return rho_; }
    double c_plus() const { return cplus_; }

    double operator()(double sir) const {
        if (form_ == Form::TruncatedIdentity) return std::min(sir, cplus_);
        return table_(sir);
    }

    double lipschitz() const { return form_ == Form::TruncatedIdentity ? 1.0 : table_.max_abs_slope(); }

    // x_c = inf{x : g(x) >= c}, so that g(x) < c iff x < x_c.
    double sir_threshold(double c) const {
        if (c > cplus_) return std::numeric_limits<double>::infinity();
        if (form_ == Form::TruncatedIdentity) return std::max(c, 0.0);
        const auto& xs = table_.xs();
        const auto& ys = table_.ys();
        if (c <= ys.front()) return 0.0;
        for (std::size_t i = 1; i < ys.size(); ++i)
            if (c <= ys[i]) return xs[i - 1] + (c - ys[i - 1]) / (ys[i] - ys[i - 1]) * (xs[i] - xs[i - 1]);
        return xs.back();
    }

private:
    explicit QosFunction(Form f) : form_(f) {}
    Form form_;
    double rho_ = 1.0, cplus_ = 1.0;
    PiecewiseLinear table_;
};

class SpatialIntensity {
public:
    enum class Form { UniformOnWindow, Radial2D };

    static SpatialIntensity uniform(double mass) {
        if (!(mass >= 0) || !std::isfinite(mass)) throw ModelError("intensity mass must be finite and nonnegative");
        SpatialIntensity s(Form::UniformOnWindow);
        s.mass_ = mass;
        return s;
    }
    // Radial density q(s) on [0, r] of a disk, tabulated; total mass is the integral of q.
    static SpatialIntensity radial(std::vector<double> s, std::vector<double> q) {
        SpatialIntensity out(Form::Radial2D);
        for (double v : q)
            if (!(v >= 0)) throw ModelError("radial density must be nonnegative");
        out.q_ = PiecewiseLinear(std::move(s), std::move(q));
        if (out.q_.front_x() != 0.0) throw ModelError("radial density table must start at 0");
        out.mass_ = out.q_.total();
        return out;
    }
    // Samples an analytic radial density on n equally spaced points of [0, r].
    template <class F>
    static SpatialIntensity radial_function(F&& q, double r, int n = 1025) {
        if (n < 2) throw ParameterError("need at least two radial samples");
        std::vector<double> s(n), v(n);
        for (int i = 0; i < n; ++i) {
            s[i] = r * i / (n - 1);
            v[i] = q(s[i]);
        }
        return radial(std::move(s), std::move(v));
    }

    Form form() const { return form_; }
    double total_mass() const { return mass_; }

    // Radial density on [0, r] for a disk window.
    PiecewiseLinear radial_density(const Window& w) const {
        if (w.shape() != Window::Shape::Disk2D) throw ModelError("radial density requires a disk window");
        if (form_ == Form::Radial2D) return q_;
        return PiecewiseLinear({0.0, w.r()}, {0.0, 2.0 * mass_ / w.r()});
    }

private:
    explicit SpatialIntensity(Form f) : form_(f) {}
    Form form_;
    double mass_ = 0.0;
    PiecewiseLinear q_;
};

// Base-station fading: fixed value, default midpoint, or an independent random law.
class BaseFading {
public:
    static BaseFading midpoint() { return BaseFading(); }
    static BaseFading fixed(double f) {
        if (!(f > 0)) throw ModelError("base fading must be positive");
        BaseFading b;
        b.fixed_ = f;
        return b;
    }
    static BaseFading random(FadingLaw law) {
        BaseFading b;
        b.law_ = std::move(law);
        return b;
    }

    bool is_random() const { return law_.has_value(); }
    bool is_default() const { return !fixed_ && !law_; }
    std::optional<double> fixed_value() const { return fixed_; }
    const FadingLaw& law() const {
        if (!law_) throw ModelError("base fading is not random");
        return *law_;
    }

private:
    std::optional<double> fixed_;
    std::optional<FadingLaw> law_;
};

class NetworkModel {
public:
    NetworkModel(Window window, PathLoss path_loss, FadingLaw fading, QosFunction qos, SpatialIntensity intensity,
                 BaseFading base = BaseFading::midpoint())
        : window_(std::move(window)),
          path_loss_(std::move(path_loss)),
          fading_(std::move(fading)),
          qos_(std::move(qos)),
          intensity_(std::move(intensity)),
          base_(std::move(base)) {
        if (intensity_.form() == SpatialIntensity::Form::Radial2D) {
            if (window_.shape() != Window::Shape::Disk2D) throw ModelError("radial intensity requires a disk window");
            if (std::abs(intensity_.radial_density(window_).back_x() - window_.r()) > 1e-9 * window_.r())
                throw ModelError("radial density table must end at the disk radius");
        }
        auto [lmin, lmax] = fadingld::extremal_path_loss(path_loss_, window_);
        if (!(lmin > 0) || !std::isfinite(lmax)) throw ModelError("path-loss must be positive and finite on W");
        if (auto f = base_.fixed_value()) {
            if (*f < fading_.fmin() || *f > fading_.fmax())
                throw ModelError("fixed base fading must lie in [F_min, F_max]");
        }
        if (base_.is_random()) {
            const auto& l = base_.law();
            if (l.fmin() < fading_.fmin() || l.fmax() > fading_.fmax())
                throw ModelError("random base fading must be supported in [F_min, F_max]");
        }
    }

    const Window& window() const { return window_; }
    const PathLoss& path_loss() const { return path_loss_; }
    const FadingLaw& fading() const { return fading_; }
    const QosFunction& qos() const { return qos_; }
    const SpatialIntensity& intensity() const { return intensity_; }
    const BaseFading& base() const { return base_; }
    int dim() const { return window_.dim(); }
    double fmin() const { return fading_.fmin(); }
    double fmax() const { return fading_.fmax(); }

    // F_o for SIR evaluation: the fixed value, otherwise the midpoint (also the grid anchor for random F_o).
    double base_fading() const {
        if (auto f = base_.fixed_value()) return *f;
        return 0.5 * (fading_.fmin() + fading_.fmax());
    }

    NetworkModel with_base(double fo) const {
        NetworkModel m = *this;
        m.base_ = BaseFading::fixed(fo);
        if (fo < fading_.fmin() || fo > fading_.fmax())
            throw ModelError("fixed base fading must lie in [F_min, F_max]");
        return m;
    }
    NetworkModel with_intensity(SpatialIntensity in) const {
        return NetworkModel(window_, path_loss_, fading_, qos_, std::move(in), base_);
    }

    std::pair<double, double> extremal_path_loss() const { return fadingld::extremal_path_loss(path_loss_, window_); }

private:
    Window window_;
    PathLoss path_loss_;
    FadingLaw fading_;
    QosFunction qos_;
    SpatialIntensity intensity_;
    BaseFading base_;
};

struct MarkedAtom {
    Point x{};
    double u = 0.0;
    double w = 0.0;
};

// Finite measure on W x [F_min, F_max]: weighted atoms, or grid cells stored as (center, mass).
class MarkedMeasure {
public:
    enum class Repr { Atoms, Grid };

    explicit MarkedMeasure(int dim = 2, Repr repr = Repr::Atoms) : dim_(dim), repr_(repr) {}

    static MarkedMeasure from_atoms(int dim, std::vector<MarkedAtom> atoms) {
        MarkedMeasure m(dim, Repr::Atoms);
        for (const auto& a : atoms) m.add(a.x, a.u, a.w);
        return m;
    }

    void add(const Point& x, double u, double w) {
        if (repr_ == Repr::Atoms ? !(w > 0) : !(w >= 0)) throw ModelError("measure weights must be positive");
        if (!std::isfinite(w)) throw ModelError("measure weights must be finite");
        points_.push_back({x, u, w});
    }
    void reserve(std::size_t n) { points_.reserve(n); }
    void clear() { points_.clear(); }

    int dim() const { return dim_; }
    Repr repr() const { return repr_; }
    const std::vector<MarkedAtom>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    double total_mass() const {
        CompensatedSum s;
        for (const auto& a : points_) s += a.w;
        return s.value();
    }

    MarkedMeasure scaled(double a) const {
        if (!(a > 0)) throw ParameterError("measure scale factor must be positive");
        MarkedMeasure m = *this;
        for (auto& p : m.points_) p.w *= a;
        return m;
    }

    // Keeps the entries selected by `keep` (same representation).
    template <class Pred>
    MarkedMeasure filtered(Pred keep) const {
        MarkedMeasure m(dim_, repr_);
        for (std::size_t i = 0; i < points_.size(); ++i)
            if (keep(i)) m.points_.push_back(points_[i]);
        return m;
    }

private:
    int dim_;
    Repr repr_;
    std::vector<MarkedAtom> points_;
};

struct GridResolution {
    int spatial = 32;   // cells per axis (box) or rings (disk)
    int angular = 32;   // sectors (disk only)
    int fading = 16;    // fading cells (continuous laws)
};

// (center, mass) cells of a fading law.
inline std::vector<std::pair<double, double>> fading_cells(const FadingLaw& law, int n) {
    std::vector<std::pair<double, double>> out;
    if (law.form() == FadingLaw::Form::DiscreteAtoms) {
        for (std::size_t i = 0; i < law.atom_values().size(); ++i)
            out.emplace_back(law.atom_values()[i], law.atom_weights()[i]);
        return out;
    }
    if (n < 1) throw ParameterError("fading resolution must be positive");
    double a = law.fmin(), b = law.fmax(), h = (b - a) / n;
    for (int k = 0; k < n; ++k) {
        double lo = a + k * h, hi = k + 1 == n ? b : a + (k + 1) * h;
        double m = law.cdf(hi) - law.cdf(lo);
        if (m > 0) out.emplace_back(0.5 * (lo + hi), m);
    }
    return out;
}

// Spatial cells (center, mass) of mu.
inline std::vector<std::pair<Point, double>> spatial_cells(const NetworkModel& model, const GridResolution& res) {
    if (res.spatial < 1 || res.angular < 1) throw ParameterError("grid resolution must be positive");
    const Window& w = model.window();
    std::vector<std::pair<Point, double>> out;
    if (w.shape() == Window::Shape::Box) {
        int n = res.spatial, d = w.dim();
        double h = 2.0 * w.r() / n;
        std::size_t count = 1;
        for (int k = 0; k < d; ++k) count *= static_cast<std::size_t>(n);
        double m = model.intensity().total_mass() / static_cast<double>(count);
        for (std::size_t idx = 0; idx < count; ++idx) {
            Point x{};
            std::size_t rest = idx;
            for (int k = 0; k < d; ++k) {
                x[k] = -w.r() + (static_cast<double>(rest % n) + 0.5) * h;
                rest /= n;
            }
            out.emplace_back(x, m);
        }
        return out;
    }
    PiecewiseLinear q = model.intensity().radial_density(w);
    int nr = res.spatial, nt = res.angular;
    double hr = w.r() / nr, ht = 2.0 * std::numbers::pi / nt;
    for (int i = 0; i < nr; ++i) {
        double s0 = i * hr, s1 = i + 1 == nr ? w.r() : (i + 1) * hr;
        double ring = q.cumulative(s1) - q.cumulative(s0);
        double sm = 0.5 * (s0 + s1);
        for (int j = 0; j < nt; ++j) {
            double th = (j + 0.5) * ht;
            out.emplace_back(Point{sm * std::cos(th), sm * std::sin(th), 0.0}, ring / nt);
        }
    }
    return out;
}

// mu' = mu (x) zeta as a grid measure with midpoint cell centers.
inline MarkedMeasure product_intensity(const NetworkModel& model, const GridResolution& res = {}) {
    if (res.fading < 1) throw ParameterError("grid resolution must be positive");
    auto space = spatial_cells(model, res);
    auto fade = fading_cells(model.fading(), res.fading);
    MarkedMeasure m(model.dim(), MarkedMeasure::Repr::Grid);
    m.reserve(space.size() * fade.size());
    for (const auto& [x, mx] : space)
        for (const auto& [u, mu] : fade) m.add(x, u, mx * mu);
    return m;
}

}  // namespace fadingld
