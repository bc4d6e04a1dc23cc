#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entropy.hpp"
#include "model.hpp"
#include "sir.hpp"

namespace fadingld {

// Direct-uplink problem on the disk B_r(o): radial density q, fading density f, decreasing l,
// SIR threshold c and frustrated-mass target b (absolute mass, not a fraction).
struct RadialProblem {
    PiecewiseLinear q;
    FadingLaw fading = FadingLaw::uniform(1.0, 2.0);
    PathLoss path_loss = PathLoss::constant(1.0);
    double r = 1.0;
    double c = 1.0;
    double b = 0.0;

    static RadialProblem from_model(const NetworkModel& model, double c, double b) {
        if (model.window().shape() != Window::Shape::Disk2D) throw ModelError("radial problem needs a disk window");
        RadialProblem p{model.intensity().radial_density(model.window()), model.fading(), model.path_loss(),
                        model.window().r(), c, b};
        p.validate();
        return p;
    }

    void validate() const {
        if (!fading.continuous()) throw ModelError("radial problem needs a fading density");
        if (!path_loss.nonincreasing()) throw ModelError("radial problem needs a nonincreasing path-loss");
        if (!(c > 0)) throw ParameterError("SIR threshold must be positive");
        if (!(b >= 0)) throw ParameterError("frustrated mass target must be nonnegative");
        if (!(r > 0)) throw ModelError("radius must be positive");
    }

    double mass() const { return q.total(); }
    // range of the random path-loss t = l(s) u over the support
    double t_min() const { return path_loss.value(r) * fading.fmin(); }
    double t_max() const { return path_loss.value(0.0) * fading.fmax(); }
};

// Tensor Gauss-Legendre nodes of q(s) f(u) ds du, split along t = l(s) u = alpha.
// Region A is {t < alpha}, region B its complement.
class RadialQuadrature {
public:
    struct Moments {
        double a0 = 0, a1 = 0, a2 = 0, b0 = 0, b1 = 0, b2 = 0;
    };

    RadialQuadrature(const RadialProblem& p, double alpha, int panels = 4) : alpha_(alpha) {
        const double fmin = p.fading.fmin(), fmax = p.fading.fmax();
        std::vector<double> sb = p.path_loss.breakpoints();
        const auto& qx = p.q.xs();
        if (qx.size() <= 64) sb.insert(sb.end(), qx.begin(), qx.end());
        // s where the split point alpha / l(s) crosses the ends of the fading range
        for (double edge : {fmin, fmax}) {
            double level = alpha / edge;
            double l0 = p.path_loss.value(0.0), lr = p.path_loss.value(p.r);
            if (level < l0 && level > lr)
                sb.push_back(bisect([&](double s) { return p.path_loss.value(s) - level; }, 0.0, p.r));
        }
        std::vector<double> ss, sw;
        append_gauss_nodes_split(0.0, p.r, sb, panels, ss, sw);
        const std::vector<double> ub = p.fading.breakpoints();
        std::vector<double> us, uw;
        for (std::size_t i = 0; i < ss.size(); ++i) {
            double ls = p.path_loss.value(ss[i]);
            double qs = p.q(ss[i]) * sw[i];
            if (qs == 0) continue;
            double split = std::clamp(alpha / ls, fmin, fmax);
            for (int region = 0; region < 2; ++region) {
                double lo = region == 0 ? fmin : split, hi = region == 0 ? split : fmax;
                us.clear();
                uw.clear();
                append_gauss_nodes_split(lo, hi, ub, 1, us, uw);
                auto& T = region == 0 ? ta_ : tb_;
                auto& W = region == 0 ? wa_ : wb_;
                for (std::size_t j = 0; j < us.size(); ++j) {
                    double w = qs * uw[j] * p.fading.pdf(us[j]);
                    if (w == 0) continue;
                    T.push_back(ls * us[j]);
                    W.push_back(w);
                }
            }
        }
        CompensatedSum tot;
        for (double w : wa_) tot += w;
        for (double w : wb_) tot += w;
        total_ = tot.value();
    }

    double alpha() const { return alpha_; }
    double total_mass() const { return total_; }
    bool region_a_empty() const { return wa_.empty(); }
    bool region_b_empty() const { return wb_.empty(); }
    double region_a_t_min() const { return wa_.empty() ? NAN : *std::min_element(ta_.begin(), ta_.end()); }
    double region_a_t_max() const { return wa_.empty() ? NAN : *std::max_element(ta_.begin(), ta_.end()); }

    // Sums of w t^k exp(beta t) over each region.
    Moments moments(double beta) const {
        Moments m;
        accumulate(ta_, wa_, beta, m.a0, m.a1, m.a2);
        accumulate(tb_, wb_, beta, m.b0, m.b1, m.b2);
        return m;
    }

    // Sum over the nodes of w * F(t, in_region_a).
    template <class F>
    double sum(F&& fn) const {
        CompensatedSum s;
        for (std::size_t i = 0; i < ta_.size(); ++i) s += wa_[i] * fn(ta_[i], true);
        for (std::size_t i = 0; i < tb_.size(); ++i) s += wb_[i] * fn(tb_[i], false);
        return s.value();
    }

private:
    static void accumulate(const std::vector<double>& t, const std::vector<double>& w, double beta, double& s0,
                           double& s1, double& s2) {
        CompensatedSum a, b, c;
        for (std::size_t i = 0; i < t.size(); ++i) {
            double e = w[i] * std::exp(beta * t[i]);
            a += e;
            b += e * t[i];
            c += e * t[i] * t[i];
        }
        s0 = a.value();
        s1 = b.value();
        s2 = c.value();
    }

    double alpha_;
    std::vector<double> ta_, wa_, tb_, wb_;
    double total_ = 0;
};

struct Multipliers {
    double beta = 0.0;
    double delta = 0.0;
    double residual_interference = 0.0;  // achieved interference - alpha / c
    double residual_mass = 0.0;          // achieved frustrated mass - b
    int iterations = 0;
    bool newton = true;  // false when the bisection fallback produced the answer
};

struct MinimizerSolution {
    enum class Kind { DirectUplink, B0, PathLossFreeDownlink };

    Kind kind = Kind::DirectUplink;
    double alpha_min = std::numeric_limits<double>::quiet_NaN();
    double beta = 0.0;   // tilt of l(s)u (direct uplink) or gamma_0 (b = 0)
    double delta = 0.0;  // frustrated-region shift (direct uplink) or mass shift (downlink)
    double gamma = 0.0;  // fading tilt (path-loss-free downlink) or gamma_0
    double entropy = 0.0;
    double residual_interference = 0.0;
    double residual_mass = 0.0;
    bool prior = false;  // the a-priori measure itself solves the problem
    std::string note;
    std::function<double(double, double)> density;  // h(s, u)
};

namespace detail {

inline double max_beta(const RadialProblem& p) { return 600.0 / std::max(p.t_max(), 1e-300); }

inline Multipliers residuals(const RadialQuadrature& Q, double beta, double delta, double target, double b) {
    auto m = Q.moments(beta);
    double e = std::exp(delta);
    Multipliers r;
    r.beta = beta;
    r.delta = delta;
    r.residual_interference = e * m.a1 + m.b1 - target;
    r.residual_mass = e * m.a0 - b;
    return r;
}

}  // namespace detail

// (beta, delta) with h = q f exp(beta l u + delta 1{l u < alpha}) meeting
//   integral of l u h = alpha / c  and  mass of h on {l u < alpha} = b.
inline Multipliers solve_multipliers(const RadialProblem& p, double alpha, const RadialQuadrature* quad = nullptr) {
    if (!(p.b > 0)) throw ParameterError("frustrated mass target must be positive");
    std::optional<RadialQuadrature> own;
    if (!quad) quad = &own.emplace(p, alpha);
    const RadialQuadrature& Q = *quad;
    if (Q.region_a_empty()) throw InfeasibleError("no user can be frustrated at this alpha");
    const double T = alpha / p.c, b = p.b;
    const double tol = 1e-13 * std::max({1.0, T, b});
    const double bmax = detail::max_beta(p);

    double beta = 0.0;
    double delta = std::log(b / Q.moments(0.0).a0);
    auto norm_of = [](const Multipliers& r) {
        return std::max(std::abs(r.residual_interference), std::abs(r.residual_mass));
    };
    Multipliers cur = detail::residuals(Q, beta, delta, T, b);
    int it = 0;
    bool ok = std::isfinite(norm_of(cur));
    for (; ok && it < 100 && norm_of(cur) > tol; ++it) {
        auto m = Q.moments(beta);
        double e = std::exp(delta);
        double j11 = e * m.a2 + m.b2, j12 = e * m.a1, j21 = e * m.a1, j22 = e * m.a0;
        double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 0) || !std::isfinite(det)) {
            ok = false;
            break;
        }
        double f1 = cur.residual_interference, f2 = cur.residual_mass;
        double db = -(j22 * f1 - j12 * f2) / det;
        double dd = -(-j21 * f1 + j11 * f2) / det;
        double step = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h, step *= 0.5) {
            double nb = beta + step * db, nd = delta + step * dd;
            if (std::abs(nb) > bmax) continue;
            Multipliers trial = detail::residuals(Q, nb, nd, T, b);
            if (std::isfinite(norm_of(trial)) && norm_of(trial) < norm_of(cur)) {
                beta = nb;
                delta = nd;
                cur = trial;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (ok && norm_of(cur) <= 1e-10 * std::max({1.0, T, b})) {
        cur.iterations = it;
        cur.newton = true;
        return cur;
    }

    // Fallback: eliminate delta = log(b / A0(beta)); the remaining equation is increasing in beta.
    auto phi = [&](double bt) {
        auto m = Q.moments(bt);
        return b * m.a1 / m.a0 + m.b1 - T;
    };
    double lo = -1.0, hi = 1.0;
    while (phi(lo) > 0 && lo > -bmax) lo = std::max(2 * lo, -bmax);
    while (phi(hi) < 0 && hi < bmax) hi = std::min(2 * hi, bmax);
    if (phi(lo) > 0 || phi(hi) < 0)
        throw InfeasibleError("interference target unreachable with the requested frustrated mass");
    beta = bisect(phi, lo, hi, 300);
    delta = std::log(b / Q.moments(beta).a0);
    cur = detail::residuals(Q, beta, delta, T, b);
    cur.iterations = 300;
    cur.newton = false;
    if (!(norm_of(cur) <= 1e-8)) throw SolverError("multiplier solve did not converge", norm_of(cur));
    return cur;
}

// Relative entropy of h_alpha = q f exp(beta t + delta 1_A) with respect to mu'.
inline double entropy_of_tilt(const RadialQuadrature& Q, double beta, double delta) {
    return std::max(0.0, Q.sum([&](double t, bool a) {
        double phi = beta * t + (a ? delta : 0.0);
        return std::exp(phi) * (phi - 1.0) + 1.0;
    }));
}

inline double entropic_cost(const RadialProblem& p, double alpha) {
    RadialQuadrature Q(p, alpha);
    Multipliers m = solve_multipliers(p, alpha, &Q);
    return entropy_of_tilt(Q, m.beta, m.delta);
}

namespace detail {

inline std::function<double(double, double)> tilted_density(const RadialProblem& p, double alpha, double beta,
                                                            double delta) {
    return [q = p.q, f = p.fading, pl = p.path_loss, alpha, beta, delta](double s, double u) {
        double t = pl.value(s) * u;
        return q(s) * f.pdf(u) * std::exp(beta * t + (t < alpha ? delta : 0.0));
    };
}

inline double updir_prior_mass(const RadialProblem& p, double alpha) {
    RadialQuadrature Q(p, alpha);
    return Q.moments(0.0).a0;
}

}  // namespace detail

// Interference of mu' at the origin, by the same quadrature the solvers use.
inline double radial_interference(const RadialProblem& p) {
    RadialQuadrature Q(p, p.t_max());
    return Q.sum([](double t, bool) { return t; });
}

inline MinimizerSolution minimize_direct_uplink(const RadialProblem& p) {
    p.validate();
    if (!(p.b > 0)) throw ParameterError("direct-uplink minimizer needs b > 0");
    MinimizerSolution sol;
    sol.kind = MinimizerSolution::Kind::DirectUplink;
    const double i0 = radial_interference(p);
    const double alpha_prior = p.c * i0;
    const double prior_mass = detail::updir_prior_mass(p, alpha_prior);
    if (p.b <= prior_mass * (1 + 1e-12)) {
        sol.prior = true;
        sol.alpha_min = alpha_prior;
        sol.residual_mass = prior_mass - p.b;
        sol.note = "event not unlikely under the a-priori measure";
        sol.density = detail::tilted_density(p, alpha_prior, 0.0, 0.0);
        return sol;
    }

    const double lo = p.t_min(), hi = p.t_max();
    auto cost = [&](double a) {
        try {
            return entropic_cost(p, a);
        } catch (const InfeasibleError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const SolverError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    constexpr int coarse = 64;
    std::vector<double> as(coarse + 1), cs(coarse + 1, std::numeric_limits<double>::infinity());
    int best = -1;
    for (int k = 1; k <= coarse; ++k) {
        as[k] = lo + (hi - lo) * k / coarse;
        cs[k] = cost(as[k]);
        if (std::isfinite(cs[k]) && (best < 0 || cs[k] < cs[best])) best = k;
    }
    if (best < 0) throw InfeasibleError("no admissible alpha for this (c, b)");
    as[0] = lo;
    // golden-section refinement on the bracket around the best coarse point; lo itself is never evaluated
    double a = as[best - 1], d = best < coarse ? as[best + 1] : as[best];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = d - gr * (d - a), x2 = a + gr * (d - a);
    double f1 = cost(x1), f2 = cost(x2);
    for (int it = 0; it < 80 && d - a > 1e-13 * hi; ++it) {
        if (f1 <= f2) {
            d = x2;
            x2 = x1;
            f2 = f1;
            x1 = d - gr * (d - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (d - a);
            f2 = cost(x2);
        }
    }
    double amin = f1 <= f2 ? x1 : x2;
    double fmin = std::min(f1, f2);
    if (cs[best] < fmin) {
        amin = as[best];
    }
    RadialQuadrature Q(p, amin);
    Multipliers m = solve_multipliers(p, amin, &Q);
    sol.alpha_min = amin;
    sol.beta = m.beta;
    sol.delta = m.delta;
    sol.entropy = entropy_of_tilt(Q, m.beta, m.delta);
    sol.residual_interference = m.residual_interference;
    sol.residual_mass = m.residual_mass;
    sol.density = detail::tilted_density(p, amin, m.beta, m.delta);
    return sol;
}

// b = 0: h_0 = q f exp(gamma_0 l u) with the interference pushed to alpha_0 / c, alpha_0 = l(r) F_min.
inline MinimizerSolution minimize_b0(const RadialProblem& p) {
    p.validate();
    MinimizerSolution sol;
    sol.kind = MinimizerSolution::Kind::B0;
    const double alpha0 = p.t_min();
    const double target = alpha0 / p.c;
    RadialQuadrature Q(p, alpha0);
    sol.alpha_min = alpha0;
    auto psi = [&](double g) { return Q.moments(g).b1 + Q.moments(g).a1 - target; };
    double at_zero = psi(0.0);
    if (at_zero >= 0) {
        sol.prior = true;
        sol.residual_interference = at_zero;
        if (at_zero > 1e-12 * target) sol.note = "a-priori frustrated mass is already positive at this c";
        sol.density = detail::tilted_density(p, alpha0, 0.0, 0.0);
        return sol;
    }
    double hi = 1.0, bmax = detail::max_beta(p);
    while (psi(hi) < 0 && hi < bmax) hi = std::min(2 * hi, bmax);
    if (psi(hi) < 0) throw InfeasibleError("interference target unreachable");
    double lo = 0.0;
    // safeguarded Newton on the convex increasing psi
    double g = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        auto m = Q.moments(g);
        double f = m.a1 + m.b1 - target;
        if (f > 0)
            hi = g;
        else
            lo = g;
        if (std::abs(f) <= 1e-14 * target) break;
        double ng = g - f / (m.a2 + m.b2);
        g = (ng > lo && ng < hi) ? ng : 0.5 * (lo + hi);
        if (hi - lo < 1e-16 * std::max(1.0, hi)) break;
    }
    sol.beta = sol.gamma = g;
    sol.residual_interference = psi(g);
    sol.entropy = entropy_of_tilt(Q, g, 0.0);
    sol.density = detail::tilted_density(p, alpha0, g, 0.0);
    return sol;
}

// Path-loss-free direct downlink: SIR = F_o / integral of u d nu, so the constraints are
// integral of u d nu >= F_o / c and nu(W) >= b; minimizer density q f exp(gamma u + delta).
inline MinimizerSolution minimize_pathloss_free_downlink(const NetworkModel& model, double b, double c) {
    if (model.path_loss().form() != PathLoss::Form::Constant)
        throw ModelError("path-loss-free minimizer needs a constant path-loss");
    if (!(c > 0) || !(c < model.qos().c_plus())) throw ParameterError("threshold must lie in (0, c_plus)");
    if (!(b >= 0)) throw ParameterError("mass target must be nonnegative");
    const double M = model.intensity().total_mass();
    if (!(M > 0)) throw ModelError("empty intensity");
    const FadingLaw& f = model.fading();
    const double fo = model.base_fading();
    const double A = fo / c;

    std::vector<double> us, ws;
    if (f.continuous()) {
        std::vector<double> raw;
        append_gauss_nodes_split(f.fmin(), f.fmax(), f.breakpoints(), 4, us, raw);
        for (std::size_t i = 0; i < us.size(); ++i) ws.push_back(M * raw[i] * f.pdf(us[i]));
    } else {
        us = f.atom_values();
        for (double w : f.atom_weights()) ws.push_back(M * w);
    }
    auto Z = [&](double g, int k) {
        CompensatedSum s;
        for (std::size_t i = 0; i < us.size(); ++i) s += ws[i] * std::pow(us[i], k) * std::exp(g * us[i]);
        return s.value();
    };
    auto entropy = [&](double g, double d) {
        CompensatedSum s;
        for (std::size_t i = 0; i < us.size(); ++i) {
            double phi = g * us[i] + d;
            s += ws[i] * (std::exp(phi) * (phi - 1.0) + 1.0);
        }
        return std::max(0.0, s.value());
    };
    const double gmax = 600.0 / f.fmax();
    auto solve_increasing = [&](auto&& fn) {
        double lo = 0.0, hi = 1.0;
        while (fn(hi) < 0 && hi < gmax) hi = std::min(2 * hi, gmax);
        if (fn(hi) < 0) throw InfeasibleError("fading tilt out of range");
        return bisect(fn, lo, hi, 300);
    };

    struct Candidate {
        double g, d, ent;
        bool both;
    };
    std::vector<Candidate> cands;
    const double load0 = Z(0.0, 1);
    if (load0 >= A && M >= b) cands.push_back({0.0, 0.0, 0.0, false});
    {
        // mass constraint dropped
        double g = load0 >= A ? 0.0 : solve_increasing([&](double x) { return Z(x, 1) - A; });
        if (Z(g, 0) >= b * (1 - 1e-14)) cands.push_back({g, 0.0, entropy(g, 0.0), false});
    }
    if (b > M && b * Z(0.0, 1) / M >= A * (1 - 1e-14)) {
        double d = std::log(b / M);
        cands.push_back({0.0, d, entropy(0.0, d), false});
    }
    if (b > 0 && A / b > f.fmin() && A / b < f.fmax()) {
        double target = A / b;
        double mean0 = Z(0.0, 1) / Z(0.0, 0);
        if (target >= mean0) {
            double g = solve_increasing([&](double x) { return Z(x, 1) / Z(x, 0) - target; });
            double d = std::log(b / Z(g, 0));
            if (d >= -1e-14) cands.push_back({g, std::max(d, 0.0) == 0.0 ? d : d, entropy(g, d), true});
        }
    }
    if (cands.empty()) throw InfeasibleError("no admissible downlink tilt");
    auto best = *std::min_element(cands.begin(), cands.end(),
                                  [](const Candidate& x, const Candidate& y) { return x.ent < y.ent; });
    MinimizerSolution sol;
    sol.kind = MinimizerSolution::Kind::PathLossFreeDownlink;
    sol.gamma = best.g;
    sol.delta = best.d;
    sol.entropy = best.ent;
    sol.prior = best.g == 0.0 && best.d == 0.0;
    double e = std::exp(best.d);
    sol.residual_interference = e * Z(best.g, 1) - A;
    sol.residual_mass = e * Z(best.g, 0) - b;
    if (best.both) sol.note = "interference and mass constraints active";
    const Window& w = model.window();
    std::function<double(double)> qfun;
    if (w.shape() == Window::Shape::Disk2D) {
        qfun = [q = model.intensity().radial_density(w)](double s) { return q(s); };
    } else {
        double dens = M / w.volume();
        qfun = [dens](double) { return dens; };
    }
    sol.density = [qfun, f, g = best.g, d = best.d](double s, double u) {
        double fu = f.continuous() ? f.pdf(u) : 1.0;
        return qfun(s) * fu * std::exp(g * u + d);
    };
    return sol;
}

// ---------------------------------------------------------------------------------------------
// Brute-force grid oracle: minimize the cellwise relative entropy under linear constraints.

struct LinearConstraint {
    std::vector<double> coeff;
    double target = 0.0;
    bool at_least = false;  // >= instead of =
};

struct OracleResult {
    double entropy = std::numeric_limits<double>::infinity();
    std::vector<double> masses;      // nu per cell
    std::vector<double> ratio;       // nu / mu' per cell
    std::vector<double> multipliers; // one per constraint (0 when inactive)
    double max_residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

namespace detail {

// Equality-constrained dual ascent: nu_c = mu_c exp(lambda . a_c), Newton steps with backtracking.
inline OracleResult dual_equality(std::span<const double> base, const std::vector<const LinearConstraint*>& cons,
                                  double tol, int max_iter) {
    const std::size_t n = base.size(), k = cons.size();
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    std::vector<double> nu(n);
    auto expo = [&](const Eigen::VectorXd& l, std::size_t c) {
        double z = 0;
        for (std::size_t j = 0; j < k; ++j) z += l[j] * cons[j]->coeff[c];
        return z;
    };
    auto dual = [&](const Eigen::VectorXd& l) {
        CompensatedSum s;
        for (std::size_t j = 0; j < k; ++j) s += l[j] * cons[j]->target;
        for (std::size_t c = 0; c < n; ++c) s += -base[c] * (std::exp(expo(l, c)) - 1.0);
        return s.value();
    };
    OracleResult res;
    double scale = 1.0;
    for (auto* cst : cons) scale = std::max(scale, std::abs(cst->target));
    double cur = dual(lam);
    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd grad(k);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k, k);
        for (std::size_t j = 0; j < k; ++j) grad[j] = cons[j]->target;
        for (std::size_t c = 0; c < n; ++c) {
            double v = base[c] * std::exp(expo(lam, c));
            for (std::size_t j = 0; j < k; ++j) {
                grad[j] -= v * cons[j]->coeff[c];
                for (std::size_t i = 0; i <= j; ++i) hess(i, j) += v * cons[i]->coeff[c] * cons[j]->coeff[c];
            }
        }
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < j; ++i) hess(j, i) = hess(i, j);
        if (k == 0 || grad.cwiseAbs().maxCoeff() < tol * scale) break;
        Eigen::VectorXd dir = hess.ldlt().solve(grad);
        if (!dir.allFinite()) dir = grad;
        double step = 1.0;
        bool moved = false;
        for (int h = 0; h < 60; ++h, step *= 0.5) {
            Eigen::VectorXd trial = lam + step * dir;
            double v = dual(trial);
            if (std::isfinite(v) && v > cur) {
                lam = trial;
                cur = v;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    res.iterations = it;
    res.multipliers.assign(lam.data(), lam.data() + k);
    res.masses.resize(n);
    res.ratio.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        res.ratio[c] = std::exp(expo(lam, c));
        res.masses[c] = base[c] * res.ratio[c];
    }
    return res;
}

}  // namespace detail

// Inequality constraints are handled by enumerating active sets and keeping the KKT-valid
// solution (nonnegative multipliers, inactive constraints satisfied) of least entropy.
inline OracleResult brute_force_oracle(std::span<const double> base, const std::vector<LinearConstraint>& cons,
                                       double tol = 1e-11, int max_iter = 200) {
    for (const auto& c : cons)
        if (c.coeff.size() != base.size()) throw ParameterError("constraint length does not match the grid");
    std::vector<std::size_t> ineq;
    for (std::size_t j = 0; j < cons.size(); ++j)
        if (cons[j].at_least) ineq.push_back(j);
    if (ineq.size() > 10) throw ParameterError("too many inequality constraints");
    OracleResult best;
    for (std::size_t mask = 0; mask < (std::size_t{1} << ineq.size()); ++mask) {
        std::vector<const LinearConstraint*> active;
        std::vector<std::size_t> active_idx;
        for (std::size_t j = 0; j < cons.size(); ++j) {
            bool on = true;
            for (std::size_t q = 0; q < ineq.size(); ++q)
                if (ineq[q] == j) on = (mask >> q) & 1U;
            if (on) {
                active.push_back(&cons[j]);
                active_idx.push_back(j);
            }
        }
        OracleResult r = detail::dual_equality(base, active, tol, max_iter);
        std::vector<double> mult(cons.size(), 0.0);
        for (std::size_t q = 0; q < active_idx.size(); ++q) mult[active_idx[q]] = r.multipliers[q];
        r.multipliers = mult;
        bool valid = true;
        double worst = 0.0;
        for (std::size_t j = 0; j < cons.size(); ++j) {
            CompensatedSum s;
            for (std::size_t c = 0; c < base.size(); ++c) s += cons[j].coeff[c] * r.masses[c];
            double resid = s.value() - cons[j].target;
            double scale = std::max(1.0, std::abs(cons[j].target));
            bool on = std::find(active_idx.begin(), active_idx.end(), j) != active_idx.end();
            if (on) {
                worst = std::max(worst, std::abs(resid) / scale);
                if (cons[j].at_least && mult[j] < -1e-9) valid = false;
            } else if (resid < -1e-9 * scale) {
                valid = false;
            }
        }
        r.max_residual = worst;
        r.converged = worst < 1e-6;
        r.entropy = rel_entropy_cells(r.masses, base).value;
        if (!valid) continue;
        if (!best.converged || (r.converged && r.entropy < best.entropy)) best = r;
    }
    return best;
}

// Radial x fading grid for the oracle; each cell may be split into its {l u < alpha} and
// {l u >= alpha} parts, each part carrying its exact mass and mean t = l(s) u.
struct OracleGrid {
    struct Piece {
        int is = 0, it = 0, iu = 0;  // ring, sector, fading cell
        double s = 0, u = 0, t = 0;  // mass-weighted means
        double mass = 0;
        bool frustrated = false;     // part of {l u < alpha}
    };
    std::vector<Piece> pieces;
    int n_s = 0, n_theta = 1, n_u = 0;

    std::vector<double> masses() const {
        std::vector<double> m;
        m.reserve(pieces.size());
        for (const auto& p : pieces) m.push_back(p.mass);
        return m;
    }
};

inline OracleGrid oracle_grid(const RadialProblem& p, int n_s, int n_u, int sub, std::optional<double> alpha,
                              int n_theta = 1) {
    if (n_s < 1 || n_u < 1 || sub < 1 || n_theta < 1) throw ParameterError("oracle grid resolution must be positive");
    OracleGrid g;
    g.n_s = n_s;
    g.n_u = n_u;
    g.n_theta = n_theta;
    const double fmin = p.fading.fmin(), fmax = p.fading.fmax();
    const double hs = p.r / n_s, hu = (fmax - fmin) / n_u;
    const auto ub = p.fading.breakpoints();
    std::vector<double> xs, wx, ys, wy;
    for (int is = 0; is < n_s; ++is) {
        xs.clear();
        wx.clear();
        append_gauss_nodes_split(is * hs, (is + 1) * hs, p.path_loss.breakpoints(), sub, xs, wx);
        for (int iu = 0; iu < n_u; ++iu) {
            const double u0 = fmin + iu * hu, u1 = iu + 1 == n_u ? fmax : fmin + (iu + 1) * hu;
            double acc[2][4] = {};
            for (std::size_t a = 0; a < xs.size(); ++a) {
                const double s = xs[a], ls = p.path_loss.value(s), ws = wx[a] * p.q(s);
                if (ws == 0) continue;
                // the u-interval splits exactly where l(s) u crosses alpha
                double cut = alpha ? std::clamp(*alpha / ls, u0, u1) : u0;
                for (int part = 0; part < 2; ++part) {
                    double lo = part == 1 ? u0 : cut, hi = part == 1 ? cut : u1;
                    if (!(hi > lo)) continue;
                    ys.clear();
                    wy.clear();
                    append_gauss_nodes_split(lo, hi, ub, 1, ys, wy);
                    for (std::size_t c = 0; c < ys.size(); ++c) {
                        double w0 = ws * wy[c] * p.fading.pdf(ys[c]);
                        acc[part][0] += w0;
                        acc[part][1] += w0 * s;
                        acc[part][2] += w0 * ys[c];
                        acc[part][3] += w0 * ls * ys[c];
                    }
                }
            }
            for (int part = 1; part >= 0; --part) {
                double m = acc[part][0];
                if (!(m > 0)) continue;
                for (int th = 0; th < n_theta; ++th) {
                    OracleGrid::Piece pc;
                    pc.is = is;
                    pc.it = th;
                    pc.iu = iu;
                    pc.mass = m / n_theta;
                    pc.s = acc[part][1] / m;
                    pc.u = acc[part][2] / m;
                    pc.t = acc[part][3] / m;
                    pc.frustrated = part == 1;
                    g.pieces.push_back(pc);
                }
            }
        }
    }
    return g;
}

inline OracleResult oracle_direct_uplink_at(const RadialProblem& p, const OracleGrid& g, double alpha) {
    LinearConstraint load, frus;
    for (const auto& pc : g.pieces) {
        load.coeff.push_back(pc.t);
        frus.coeff.push_back(pc.frustrated ? 1.0 : 0.0);
    }
    load.target = alpha / p.c;
    frus.target = p.b;
    return brute_force_oracle(g.masses(), {load, frus});
}

struct OracleSearch {
    double alpha = 0.0;
    OracleResult result;
    OracleGrid grid;
};

// Oracle counterpart of minimize_direct_uplink: its own alpha scan and its own grid.
inline OracleSearch oracle_minimize_direct_uplink(const RadialProblem& p, int n_s = 40, int n_u = 20, int sub = 1,
                                                  int n_theta = 1, int scan = 96) {
    const double lo = p.t_min(), hi = p.t_max();
    auto eval = [&](double a) {
        OracleSearch s;
        s.alpha = a;
        s.grid = oracle_grid(p, n_s, n_u, sub, a, n_theta);
        bool any = false;
        for (const auto& pc : s.grid.pieces) any = any || pc.frustrated;
        if (!any) return s;
        s.result = oracle_direct_uplink_at(p, s.grid, a);
        if (!s.result.converged) s.result.entropy = std::numeric_limits<double>::infinity();
        return s;
    };
    OracleSearch best;
    int bk = -1;
    std::vector<double> as(scan + 1);
    for (int k = 1; k <= scan; ++k) {
        as[k] = lo + (hi - lo) * k / scan;
        OracleSearch s = eval(as[k]);
        if (bk < 0 || s.result.entropy < best.result.entropy) {
            best = std::move(s);
            bk = k;
        }
    }
    as[0] = lo;
    double a = as[bk - 1], d = bk < scan ? as[bk + 1] : as[bk];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = d - gr * (d - a), x2 = a + gr * (d - a);
    OracleSearch s1 = eval(x1), s2 = eval(x2);
    for (int it = 0; it < 50; ++it) {
        if (s1.result.entropy <= s2.result.entropy) {
            d = x2;
            s2 = std::move(s1);
            x1 = d - gr * (d - a);
            s1 = eval(x1);
        } else {
            a = x1;
            s1 = std::move(s2);
            x2 = a + gr * (d - a);
            s2 = eval(x2);
        }
    }
    for (auto* s : {&s1, &s2})
        if (s->result.entropy < best.result.entropy) best = std::move(*s);
    return best;
}

}  // namespace fadingld
