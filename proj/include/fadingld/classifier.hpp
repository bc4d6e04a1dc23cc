#pragma once

#include <array>
#include <cmath>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sir.hpp"

namespace fadingld {

enum class Decay { Exponential, Subexponential };

inline const char* to_string(Decay d) { return d == Decay::Exponential ? "Exponential" : "Subexponential"; }

// Coordinates with b_i < 0 are slack: the event puts no constraint on that mode.
struct DecayVerdict {
    Decay joint = Decay::Subexponential;
    std::array<Decay, 4> per_mode{Decay::Subexponential, Decay::Subexponential, Decay::Subexponential,
                                  Decay::Subexponential};
    std::array<bool, 4> slack{};
    int case_id = 0;
    std::optional<double> epsilon;       // largest ladder value witnessing condition (i)
    std::array<double, 4> K{};           // minimal SIR vector, same grid as G
    std::array<double, 4> G{};           // a-priori frustrated masses
    std::array<double, 4> b{}, c{};
    bool boundary = false;               // some comparison fell within tolerance
    double critical_mass = 0.0;          // F_* mass of the Subexponential base fadings
    std::vector<std::string> warnings;

    std::string verdict_name() const {
        if (joint == Decay::Subexponential && boundary) return "Boundary-Subexponential";
        return to_string(joint);
    }

    std::string record() const {
        std::ostringstream os;
        os.precision(10);
        os << "verdict=" << verdict_name() << " case=" << case_id << " epsilon=";
        if (epsilon)
            os << *epsilon;
        else
            os << "none";
        os << " K=" << K[0] << ',' << K[1] << ',' << K[2] << ',' << K[3];
        return os.str();
    }
};

struct ClassifierOptions {
    GridResolution grid{16, 16, 8};
    double tol = 1e-9;
    int ladder_depth = 10;  // epsilon = 2^-1 ... 2^-depth
};

// G(mu', tau_{c_i}, m_i)(W) for the four modes on the grid mu'.
inline std::array<double, 4> a_priori_frustration(const NetworkModel& model, const std::array<double, 4>& c,
                                                  const GridResolution& res = ClassifierOptions{}.grid,
                                                  double scale = 1.0) {
    if (!(model.intensity().total_mass() > 0)) throw ModelError("a-priori frustration of an empty model");
    MarkedMeasure mu = product_intensity(model, res);
    if (scale != 1.0) mu = mu.scaled(scale);
    std::array<double, 4> g{};
    for (int i = 0; i < 4; ++i) g[i] = frustration_mass(model, mu, c[i], all_modes[i]);
    return g;
}

namespace detail {

inline void check_classifier_thresholds(const NetworkModel& model, const std::array<double, 4>& b,
                                        const std::array<double, 4>& c) {
    for (int i = 0; i < 4; ++i) {
        if (b[i] < 0) continue;
        if (!(c[i] > 0) || !(c[i] < model.qos().c_plus()))
            throw DomainError("threshold c_" + std::to_string(i + 1) + " outside (0, c_plus)");
    }
}

}  // namespace detail

inline DecayVerdict classify_fixed(const NetworkModel& model, const std::array<double, 4>& b,
                                   const std::array<double, 4>& c, const ClassifierOptions& opt = {}) {
    detail::check_classifier_thresholds(model, b, c);
    DecayVerdict v;
    v.b = b;
    v.c = c;
    const double tol = opt.tol;
    v.K = minimal_sir_vector(model, opt.grid);
    MarkedMeasure mu = product_intensity(model, opt.grid);
    for (int i = 0; i < 4; ++i) v.slack[i] = b[i] < 0;
    for (int i = 0; i < 4; ++i)
        if (!v.slack[i]) v.G[i] = frustration_mass(model, mu, c[i], all_modes[i]);

    double best_eps = 0.0;
    bool any_constrained = false;
    for (int i = 0; i < 4; ++i) {
        if (v.slack[i]) continue;
        any_constrained = true;
        const Mode m = all_modes[i];
        if (std::abs(v.G[i] - b[i]) <= tol) v.boundary = true;
        // top-down scan: the first passing epsilon is the largest one on the ladder
        std::optional<double> witness;
        double eps = 1.0;
        for (int k = 1; k <= opt.ladder_depth; ++k) {
            eps *= 0.5;
            double g = frustration_mass(model, mu.scaled(1.0 + eps), c[i], m);
            if (g <= b[i]) {
                witness = eps;
                break;
            }
        }
        if (witness && b[i] == 0 && c[i] >= v.K[i] - tol) {
            // a zero-mass witness at c_i >= K_i is a resolution artifact
            witness.reset();
            v.boundary = true;
            v.warnings.push_back(std::string("grid witness rejected for mode ") + to_string(m));
        }
        bool below_k = b[i] >= 0 && c[i] < v.K[i] - tol;
        if (witness || below_k) {
            v.per_mode[i] = Decay::Exponential;
            if (witness) best_eps = std::max(best_eps, *witness);
        }
    }
    if (best_eps > 0) v.epsilon = best_eps;
    bool exp = false;
    for (int i = 0; i < 4; ++i) exp = exp || (!v.slack[i] && v.per_mode[i] == Decay::Exponential);
    v.joint = exp ? Decay::Exponential : Decay::Subexponential;

    // case of the comparison between G(mu') and b on the constrained coordinates
    bool all_gt = true, all_eq = true, all_le = true, all_zero = true;
    for (int i = 0; i < 4; ++i) {
        if (v.slack[i]) continue;
        double d = v.G[i] - b[i];
        all_gt = all_gt && d > tol;
        all_eq = all_eq && std::abs(d) <= tol;
        all_le = all_le && d <= tol;
        all_zero = all_zero && b[i] == 0;
    }
    if (!any_constrained)
        v.case_id = 2;
    else if (all_eq && all_zero)
        v.case_id = 5;
    else if (exp)
        v.case_id = 1;
    else if (all_gt)
        v.case_id = 2;
    else if (all_eq)
        v.case_id = 4;
    else if (all_le)
        v.case_id = 3;
    else
        v.case_id = 6;
    if (v.joint == Decay::Subexponential && v.boundary)
        v.warnings.push_back("verdict decided within numerical tolerance");
    return v;
}

struct RandomBaseOptions {
    ClassifierOptions classifier;
    int scan_points = 9;
    int bisection_steps = 30;
};

// Exponential iff F_* gives zero mass to the base fadings whose fixed verdict is Subexponential.
inline DecayVerdict classify_random_base(const NetworkModel& model, const std::array<double, 4>& b,
                                         const std::array<double, 4>& c, const RandomBaseOptions& opt = {}) {
    if (!model.base().is_random()) return classify_fixed(model, b, c, opt.classifier);
    const FadingLaw& law = model.base().law();
    auto at = [&](double u) { return classify_fixed(model.with_base(u), b, c, opt.classifier); };

    if (!law.continuous()) {
        const auto& us = law.atom_values();
        const auto& ws = law.atom_weights();
        std::vector<std::future<DecayVerdict>> jobs;
        for (double u : us) jobs.push_back(std::async(std::launch::async, at, u));
        std::vector<DecayVerdict> vs;
        for (auto& j : jobs) vs.push_back(j.get());
        if (vs.size() == 1) return vs.front();
        double bad = 0.0;
        std::size_t worst = 0;
        for (std::size_t k = 0; k < vs.size(); ++k)
            if (vs[k].joint == Decay::Subexponential) {
                bad += ws[k];
                worst = k;
            }
        DecayVerdict v = vs[bad > 0 ? worst : 0];
        v.critical_mass = bad;
        v.joint = bad > 0 ? Decay::Subexponential : Decay::Exponential;
        return v;
    }

    // Lower base fading only hurts the downlink, so the Subexponential set is [min, u_c].
    const double lo = law.fmin(), hi = law.fmax();
    const int n = std::max(2, opt.scan_points);
    std::vector<std::future<DecayVerdict>> jobs;
    std::vector<double> us(n);
    for (int k = 0; k < n; ++k) {
        us[k] = lo + (hi - lo) * k / (n - 1);
        jobs.push_back(std::async(std::launch::async, at, us[k]));
    }
    std::vector<DecayVerdict> vs;
    for (auto& j : jobs) vs.push_back(j.get());
    int last_bad = -1;
    for (int k = 0; k < n; ++k)
        if (vs[k].joint == Decay::Subexponential) last_bad = k;
    for (int k = 0; k < last_bad; ++k)
        if (vs[k].joint == Decay::Exponential) {
            vs[0].warnings.push_back("verdict not monotone in the base fading on the scan grid");
            break;
        }
    if (last_bad < 0) {
        DecayVerdict v = vs.front();
        v.critical_mass = 0.0;
        v.joint = Decay::Exponential;
        return v;
    }
    double uc = us[last_bad];
    if (last_bad + 1 < n) {
        double a = us[last_bad], z = us[last_bad + 1];
        for (int it = 0; it < opt.bisection_steps; ++it) {
            double mid = 0.5 * (a + z);
            if (at(mid).joint == Decay::Subexponential)
                a = mid;
            else
                z = mid;
        }
        uc = a;
    }
    DecayVerdict v = vs.front();
    v.critical_mass = law.cdf(uc);
    v.joint = v.critical_mass > 0 ? Decay::Subexponential : Decay::Exponential;
    return v;
}

}  // namespace fadingld
