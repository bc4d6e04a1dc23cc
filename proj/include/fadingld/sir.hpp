#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "model.hpp"

namespace fadingld {

enum class Mode { Up, UpDir, Do, DoDir };

// Coordinate order of every 4-vector in the library.
inline constexpr std::array<Mode, 4> all_modes{Mode::Up, Mode::UpDir, Mode::Do, Mode::DoDir};

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::Up:
            return "up";
        case Mode::UpDir:
            return "up-dir";
        case Mode::Do:
            return "do";
        case Mode::DoDir:
            return "do-dir";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s) {
    if (s == "up") return Mode::Up;
    if (s == "up-dir" || s == "updir") return Mode::UpDir;
    if (s == "do") return Mode::Do;
    if (s == "do-dir" || s == "dodir") return Mode::DoDir;
    throw ParameterError("unknown mode '" + s + "' (expected up, up-dir, do, do-dir)");
}

inline bool is_uplink(Mode m) { return m == Mode::Up || m == Mode::UpDir; }
inline bool is_relayed(Mode m) { return m == Mode::Up || m == Mode::Do; }

// Integral of l(|x - y|) u against nu.
inline double interference(const PathLoss& pl, const MarkedMeasure& nu, const Point& y) {
    CompensatedSum s;
    for (const auto& a : nu.points())
        if (a.w > 0) s += a.w * a.u * pl.value(distance(a.x, y));
    return s.value();
}

// l(|tx - rx|) F_tx / interference; empty when nu has no mass.
inline std::optional<double> sir(const PathLoss& pl, const MarkedPoint& tx, const Point& rx, const MarkedMeasure& nu) {
    if (!(nu.total_mass() > 0)) return std::nullopt;
    double i = interference(pl, nu, rx);
    if (!std::isfinite(i)) return 0.0;
    return pl.value(distance(tx.x, rx)) * tx.u / i;
}

inline double qos_direct(const NetworkModel& model, const MarkedPoint& tx, const Point& rx, const MarkedMeasure& nu) {
    auto v = sir(model.path_loss(), tx, rx, nu);
    if (!v) return model.qos().c_plus();
    return model.qos()(*v);
}

// Two hops; the second hop transmits with the relay's fading.
inline double qos_relay(const NetworkModel& model, const MarkedPoint& tx, const MarkedPoint& relay, const Point& rx,
                        const MarkedMeasure& nu) {
    return std::min(qos_direct(model, tx, relay.x, nu), qos_direct(model, relay, rx, nu));
}

// max{D, max over positive-mass entries of Gamma}; the transmitter may relay for itself.
inline double qos_best(const NetworkModel& model, const MarkedPoint& tx, const Point& rx, const MarkedMeasure& nu) {
    double best = qos_direct(model, tx, rx, nu);
    for (const auto& a : nu.points()) {
        if (!(a.w > 0)) continue;
        best = std::max(best, qos_relay(model, tx, {a.x, a.u}, rx, nu));
    }
    return best;
}

// QoS of a user in the given mode, the base station being (o, fo).
inline double mode_qos(const NetworkModel& model, Mode mode, const MarkedPoint& user, const MarkedMeasure& nu,
                       double fo) {
    MarkedPoint base{origin, fo};
    switch (mode) {
        case Mode::UpDir:
            return qos_direct(model, user, origin, nu);
        case Mode::Up:
            return qos_best(model, user, origin, nu);
        case Mode::DoDir:
            return qos_direct(model, base, user.x, nu);
        case Mode::Do:
            return qos_best(model, base, user.x, nu);
    }
    return 0.0;
}

namespace detail {

struct Sites {
    std::vector<Point> pos;
    std::vector<std::size_t> of;      // site of each entry
    std::vector<double> load;         // sum of w*u of positive entries at the site
    std::vector<double> interference; // interference at the site
};

struct PointHash {
    std::size_t operator()(const Point& p) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (double v : p) {
            std::uint64_t b;
            std::memcpy(&b, &v, sizeof b);
            h = (h ^ b) * 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

inline Sites group_sites(const PathLoss& pl, const MarkedMeasure& nu) {
    Sites s;
    const auto& pts = nu.points();
    s.of.resize(pts.size());
    if (nu.repr() == MarkedMeasure::Repr::Atoms) {
        s.pos.reserve(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            s.of[i] = i;
            s.pos.push_back(pts[i].x);
        }
    } else {
        std::unordered_map<Point, std::size_t, PointHash> index;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto [it, fresh] = index.try_emplace(pts[i].x, s.pos.size());
            if (fresh) s.pos.push_back(pts[i].x);
            s.of[i] = it->second;
        }
    }
    s.load.assign(s.pos.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].w > 0) s.load[s.of[i]] += pts[i].w * pts[i].u;
    std::vector<std::size_t> loaded;
    for (std::size_t k = 0; k < s.pos.size(); ++k)
        if (s.load[k] > 0) loaded.push_back(k);
    s.interference.assign(s.pos.size(), 0.0);
    for (std::size_t t = 0; t < s.pos.size(); ++t) {
        CompensatedSum acc;
        for (std::size_t k : loaded) acc += s.load[k] * pl.value(distance(s.pos[k], s.pos[t]));
        s.interference[t] = acc.value();
    }
    return s;
}

}  // namespace detail

// QoS of every entry of nu, each taken as a user, against nu itself.
inline std::vector<double> mode_qos_all(const NetworkModel& model, Mode mode, const MarkedMeasure& nu, double fo) {
    const auto& pts = nu.points();
    const PathLoss& pl = model.path_loss();
    const QosFunction& g = model.qos();
    const double cplus = g.c_plus();
    std::vector<double> out(pts.size(), cplus);
    if (!(nu.total_mass() > 0)) return out;

    if (mode == Mode::UpDir) {
        double i0 = interference(pl, nu, origin);
        for (std::size_t i = 0; i < pts.size(); ++i) out[i] = g(pl.value(norm(pts[i].x)) * pts[i].u / i0);
        return out;
    }

    detail::Sites s = detail::group_sites(pl, nu);
    const std::size_t ns = s.pos.size();

    if (mode == Mode::DoDir) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            out[i] = g(pl.value(norm(pts[i].x)) * fo / s.interference[s.of[i]]);
        return out;
    }

    if (mode == Mode::Up) {
        double i0 = interference(pl, nu, origin);
        std::vector<double> direct(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) direct[i] = g(pl.value(norm(pts[i].x)) * pts[i].u / i0);
        // best second hop available at each site
        std::vector<double> hop2(ns, -1.0);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i].w > 0) hop2[s.of[i]] = std::max(hop2[s.of[i]], direct[i]);
        std::vector<std::size_t> order;
        for (std::size_t k = 0; k < ns; ++k)
            if (hop2[k] >= 0) order.push_back(k);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return hop2[a] > hop2[b]; });
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double best = direct[i];
            for (std::size_t k : order) {
                if (hop2[k] <= best) break;
                double first = g(pl.value(distance(pts[i].x, s.pos[k])) * pts[i].u / s.interference[k]);
                best = std::max(best, std::min(first, hop2[k]));
            }
            out[i] = best;
        }
        return out;
    }

    // Do: depends on the receiver's site only
    std::vector<double> hop1(ns), umax(ns, -1.0);
    for (std::size_t k = 0; k < ns; ++k) hop1[k] = g(pl.value(norm(s.pos[k])) * fo / s.interference[k]);
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].w > 0) umax[s.of[i]] = std::max(umax[s.of[i]], pts[i].u);
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < ns; ++k)
        if (umax[k] > 0) order.push_back(k);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return hop1[a] > hop1[b]; });
    std::vector<double> per_site(ns);
    for (std::size_t t = 0; t < ns; ++t) {
        double best = hop1[t];
        for (std::size_t k : order) {
            if (hop1[k] <= best) break;
            double second = g(pl.value(distance(s.pos[k], s.pos[t])) * umax[k] / s.interference[t]);
            best = std::max(best, std::min(hop1[k], second));
        }
        per_site[t] = best;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = per_site[s.of[i]];
    return out;
}

inline void check_threshold(const NetworkModel& model, double c) {
    if (!(c >= 0) || c > model.qos().c_plus()) throw ParameterError("threshold must lie in [0, c_plus]");
}

// Restriction of nu to the entries whose QoS is strictly below c.
inline MarkedMeasure frustration_measure(const NetworkModel& model, const MarkedMeasure& nu, double c, Mode mode,
                                         std::optional<double> fo = std::nullopt) {
    check_threshold(model, c);
    auto q = mode_qos_all(model, mode, nu, fo.value_or(model.base_fading()));
    return nu.filtered([&](std::size_t i) { return q[i] < c; });
}

inline double frustration_mass(const NetworkModel& model, const MarkedMeasure& nu, double c, Mode mode,
                               std::optional<double> fo = std::nullopt) {
    check_threshold(model, c);
    auto q = mode_qos_all(model, mode, nu, fo.value_or(model.base_fading()));
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] < c) s += nu.points()[i].w;
    return s.value();
}

// Integral of l(|x|) mu(dx), by quadrature that respects the kinks of l.
inline double path_loss_moment(const NetworkModel& model) {
    const Window& w = model.window();
    const PathLoss& pl = model.path_loss();
    auto br = pl.breakpoints();
    if (w.shape() == Window::Shape::Disk2D) {
        PiecewiseLinear q = model.intensity().radial_density(w);
        std::vector<double> breaks = br;
        breaks.insert(breaks.end(), q.xs().begin(), q.xs().end());
        return integrate([&](double s) { return pl.value(s) * q(s); }, 0.0, w.r(), breaks, 4);
    }
    const double r = w.r();
    std::function<double(int, double)> box = [&](int d, double s2) -> double {
        if (d == 0) return pl.value(std::sqrt(s2));
        std::vector<double> cuts;
        for (double b : br)
            if (b * b > s2) {
                double t = std::sqrt(b * b - s2);
                cuts.push_back(t);
                cuts.push_back(-t);
            }
        return integrate([&](double t) { return box(d - 1, s2 + t * t); }, -r, r, cuts, d == 3 ? 1 : 2);
    };
    return model.intensity().total_mass() / w.volume() * box(w.dim(), 0.0);
}

// Direct-uplink interference of mu' at the origin.
inline double updir_interference(const NetworkModel& model) { return model.fading().mean() * path_loss_moment(model); }

// Essential supremum of the a-priori direct-uplink SIR.
inline double updir_sir_sup(const NetworkModel& model) {
    double lmax = model.path_loss().range_on(0.0, model.window().max_radius()).second;
    return lmax * model.fmax() / updir_interference(model);
}

// (K_up, K_updir, K_do, K_dodir). K_updir is the closed form with l evaluated at the farthest
// point of the window; the other three are minima over the positive cells of the grid mu'.
inline std::array<double, 4> minimal_sir_vector(const NetworkModel& model, const GridResolution& res = {}) {
    if (!(model.intensity().total_mass() > 0)) throw ModelError("minimal SIR vector of an empty model");
    std::array<double, 4> k{};
    double lmin = model.path_loss().range_on(0.0, model.window().max_radius()).first;
    k[1] = model.qos()(lmin * model.fmin() / updir_interference(model));
    MarkedMeasure mu = product_intensity(model, res);
    const double fo = model.base_fading();
    for (int i : {0, 2, 3}) {
        auto q = mode_qos_all(model, all_modes[i], mu, fo);
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < q.size(); ++j)
            if (mu.points()[j].w > 0) m = std::min(m, q[j]);
        k[i] = m;
    }
    return k;
}

}  // namespace fadingld
