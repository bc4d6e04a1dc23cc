#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "common.hpp"

using namespace fadingld;

namespace {

RadialProblem hertz_problem(double c, double b) { return RadialProblem::from_model(hertz_model(), c, b); }

double k_updir() { return 1.0 / radial_interference(hertz_problem(1.0, 0.5)); }

// nested bisection: outer on delta (mass), inner on beta (interference)
std::pair<double, double> nested_bisection(const RadialProblem& p, double alpha) {
    RadialQuadrature Q(p, alpha);
    const double T = alpha / p.c;
    auto beta_for = [&](double d) {
        auto load = [&](double b) {
            auto m = Q.moments(b);
            return std::exp(d) * m.a1 + m.b1 - T;
        };
        double lo = -50, hi = 50;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (load(mid) < 0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto mass = [&](double d) { return std::exp(d) * Q.moments(beta_for(d)).a0 - p.b; };
    double lo = -20, hi = 20;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (mass(mid) < 0 ? lo : hi) = mid;
    }
    double d = 0.5 * (lo + hi);
    return {beta_for(d), d};
}

// relative entropy of a density h against q f, split along l(s) u = alpha
double entropy_by_quadrature(const RadialProblem& p, const std::function<double(double, double)>& h, double alpha) {
    using boost::math::quadrature::gauss_kronrod;
    const double fmin = p.fading.fmin(), fmax = p.fading.fmax();
    auto inner = [&](double s) {
        auto g = [&](double u) {
            double base = p.q(s) * p.fading.pdf(u), v = h(s, u);
            if (base == 0) return v;
            return v == 0 ? base : v * std::log(v / base) - v + base;
        };
        double cut = std::clamp(alpha / p.path_loss.value(s), fmin, fmax);
        double out = 0;
        if (cut > fmin) out += gauss_kronrod<double, 61>::integrate(g, fmin, cut, 8, 1e-13);
        if (cut < fmax) out += gauss_kronrod<double, 61>::integrate(g, cut, fmax, 8, 1e-13);
        return out;
    };
    // l has a kink where the cap kicks in
    std::vector<double> br{0.0};
    for (double x : p.path_loss.breakpoints())
        if (x > 0 && x < p.r) br.push_back(x);
    br.push_back(p.r);
    double tot = 0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
        tot += gauss_kronrod<double, 61>::integrate(inner, br[i], br[i + 1], 10, 1e-12);
    return tot;
}

}  // namespace

TEST(DirectUplink, PriorSolvesLikelyEvents) {
    RadialProblem p = hertz_problem(1.1, 0.4);
    MinimizerSolution s = minimize_direct_uplink(p);
    EXPECT_TRUE(s.prior);
    EXPECT_EQ(s.entropy, 0.0);
    EXPECT_EQ(s.beta, 0.0);
    EXPECT_EQ(s.delta, 0.0);
    // b equal to the a-priori frustrated mass is still the prior
    RadialProblem q = hertz_problem(1.1, 0.5);
    q.b = detail::updir_prior_mass(q, 1.1 * radial_interference(q));
    EXPECT_NEAR(q.b, 0.5538176803, 1e-9);
    EXPECT_TRUE(minimize_direct_uplink(q).prior);
}

TEST(DirectUplink, SolutionMeetsConstraintsAndSign) {
    for (double c : {0.5, 1.1, 1.5}) {
        for (double b : {0.8, 0.9, 0.95}) {
            RadialProblem p = hertz_problem(c, b);
            MinimizerSolution s = minimize_direct_uplink(p);
            if (s.prior) continue;
            EXPECT_LT(std::abs(s.residual_interference), 1e-8) << c << " " << b;
            EXPECT_LT(std::abs(s.residual_mass), 1e-8) << c << " " << b;
            EXPECT_GE(std::max(s.beta, s.delta), -1e-10) << c << " " << b;
            EXPECT_GT(s.entropy, 0.0);
            EXPECT_GT(s.alpha_min, p.t_min());
            EXPECT_LE(s.alpha_min, p.t_max());
        }
    }
}

TEST(DirectUplink, FrozenReferencePoint) {
    MinimizerSolution s = minimize_direct_uplink(hertz_problem(1.1, 0.9));
    ASSERT_FALSE(s.prior);
    // cross-checked against the brute-force grid oracle (40 x 20 pieces)
    EXPECT_NEAR(s.entropy, 0.0274632, 2e-6);
    EXPECT_NEAR(s.alpha_min, 7.1175, 2e-3);
}

TEST(Multipliers, NewtonMatchesNestedBisection) {
    for (double c : {0.8, 1.1, 1.4}) {
        for (double b : {0.7, 0.9}) {
            RadialProblem p = hertz_problem(c, b);
            for (double alpha : {4.0, 6.0, 8.0}) {
                Multipliers m = solve_multipliers(p, alpha);
                auto [beta, delta] = nested_bisection(p, alpha);
                EXPECT_NEAR(m.beta, beta, 1e-6) << c << " " << b << " " << alpha;
                EXPECT_NEAR(m.delta, delta, 1e-6) << c << " " << b << " " << alpha;
            }
        }
    }
}

TEST(Multipliers, EmptyFrustratedRegionIsInfeasible) {
    RadialProblem p = hertz_problem(1.1, 0.9);
    EXPECT_THROW(solve_multipliers(p, p.t_min()), InfeasibleError);
    EXPECT_THROW(minimize_direct_uplink(hertz_problem(1.1, 0.0)), ParameterError);
}

TEST(EntropicCost, NonnegativeAndMatchesDirectIntegral) {
    RadialProblem p = hertz_problem(1.1, 0.9);
    for (double alpha : {3.0, 5.0, 7.1175, 9.0}) {
        RadialQuadrature Q(p, alpha);
        Multipliers m = solve_multipliers(p, alpha, &Q);
        double cost = entropy_of_tilt(Q, m.beta, m.delta);
        EXPECT_GE(cost, 0.0);
        double direct = entropy_by_quadrature(p, detail::tilted_density(p, alpha, m.beta, m.delta), alpha);
        EXPECT_NEAR(cost, direct, 1e-6) << alpha;
    }
}

TEST(EntropicCost, MinimumIsBelowScan) {
    RadialProblem p = hertz_problem(1.1, 0.9);
    MinimizerSolution s = minimize_direct_uplink(p);
    for (int k = 1; k <= 40; ++k) {
        double a = p.t_min() + (p.t_max() - p.t_min()) * k / 40.0;
        double c;
        try {
            c = entropic_cost(p, a);
        } catch (const std::exception&) {
            continue;
        }
        EXPECT_LE(s.entropy, c + 1e-12) << a;
    }
}

TEST(B0, GammaVanishesAtThreshold) {
    const double K = k_updir();
    EXPECT_NEAR(K, 0.19200477, 1e-7);
    MinimizerSolution s = minimize_b0(hertz_problem(K, 0.0));
    EXPECT_LT(std::abs(s.gamma), 1e-12);
    EXPECT_NEAR(s.entropy, 0.0, 1e-12);
}

TEST(B0, PositiveBelowThresholdAndFrozen) {
    const double K = k_updir();
    MinimizerSolution s = minimize_b0(hertz_problem(K / 2, 0.0));
    EXPECT_GT(s.gamma, 0.0);
    EXPECT_NEAR(s.gamma, 0.10195109032944918, 1e-10);
    EXPECT_NEAR(s.alpha_min, 1.0, 1e-15);
    EXPECT_LT(std::abs(s.residual_interference), 1e-10);
    double prev = 0;
    for (double f : {0.9, 0.7, 0.5, 0.3}) {
        MinimizerSolution t = minimize_b0(hertz_problem(K * f, 0.0));
        EXPECT_GT(t.gamma, prev);
        prev = t.gamma;
    }
}

TEST(B0, SmallMassApproachesB0Cost) {
    const double K = k_updir();
    RadialProblem p0 = hertz_problem(K / 2, 0.0);
    double h0 = minimize_b0(p0).entropy;
    double prev = std::numeric_limits<double>::infinity();
    for (double b : {1e-1, 1e-2, 1e-3, 1e-4}) {
        double h = minimize_direct_uplink(hertz_problem(K / 2, b)).entropy;
        double gap = std::abs(h - h0);
        EXPECT_LT(gap, prev) << b;
        prev = gap;
    }
    EXPECT_LT(prev, 1e-2 * h0);
}

TEST(PathLossFree, ZeroMassDropsMassShift) {
    NetworkModel m = constant_model(3.0, 1.5);
    MinimizerSolution s = minimize_pathloss_free_downlink(m, 0.0, 0.5);
    EXPECT_EQ(s.delta, 0.0);
    EXPECT_GT(s.gamma, 0.0);
    EXPECT_LT(std::abs(s.residual_interference), 1e-10);
    // load 1.5 already meets 1.5 / 1.2
    MinimizerSolution t = minimize_pathloss_free_downlink(m, 0.5, 1.2);
    EXPECT_TRUE(t.prior);
    EXPECT_EQ(t.entropy, 0.0);
}

TEST(PathLossFree, LargeMassActivatesBoth) {
    NetworkModel m = constant_model(3.0, 1.5);
    MinimizerSolution s = minimize_pathloss_free_downlink(m, 3.0, 0.33);
    EXPECT_FALSE(s.note.empty());
    EXPECT_GT(s.gamma, 0.0);
    EXPECT_GT(s.delta, 0.0);
    EXPECT_LT(std::abs(s.residual_interference), 1e-9);
    EXPECT_LT(std::abs(s.residual_mass), 1e-9);
}

TEST(PathLossFree, AgreesWithOracle) {
    NetworkModel m = constant_model(3.0, 1.5);
    const int n = 4000;
    std::vector<double> base(n), u(n), ones(n, 1.0);
    for (int i = 0; i < n; ++i) {
        u[i] = 1.0 + (i + 0.5) / n;
        base[i] = 1.0 / n;
    }
    for (auto [b, c] : std::vector<std::pair<double, double>>{{0.0, 0.5}, {3.0, 0.3}, {3.0, 0.33}, {2.0, 0.9}, {0.5, 0.7}}) {
        MinimizerSolution s = minimize_pathloss_free_downlink(m, b, c);
        LinearConstraint load{u, 1.5 / c, true}, mass{ones, b, true};
        OracleResult o = brute_force_oracle(base, {load, mass});
        ASSERT_TRUE(o.converged);
        EXPECT_NEAR(s.entropy, o.entropy, 1e-6 * std::max(1.0, o.entropy)) << b << " " << c;
    }
}

TEST(Oracle, UnconstrainedIsPrior) {
    std::vector<double> base{0.1, 0.4, 0.2, 0.3};
    OracleResult o = brute_force_oracle(base, {});
    EXPECT_TRUE(o.converged);
    EXPECT_EQ(o.entropy, 0.0);
    for (double r : o.ratio) EXPECT_NEAR(r, 1.0, 1e-15);
}

TEST(Oracle, SingleLinearConstraintGivesExponentialTilt) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.1, 1.0), T(0.0, 3.0);
    std::vector<double> base(50), t(50);
    double mean = 0;
    for (int i = 0; i < 50; ++i) {
        base[i] = U(rng);
        t[i] = T(rng);
        mean += base[i] * t[i];
    }
    OracleResult o = brute_force_oracle(base, {LinearConstraint{t, 1.7 * mean, false}});
    ASSERT_TRUE(o.converged);
    // log ratio is lambda * t: least-squares slope through the origin, tiny residual
    double num = 0, den = 0;
    for (int i = 0; i < 50; ++i) {
        num += t[i] * std::log(o.ratio[i]);
        den += t[i] * t[i];
    }
    double lam = num / den;
    EXPECT_GT(lam, 0.0);
    for (int i = 0; i < 50; ++i) EXPECT_NEAR(std::log(o.ratio[i]), lam * t[i], 1e-9);
}

TEST(Oracle, DirectUplinkTiltIsAffinePlusShift) {
    RadialProblem p = hertz_problem(1.1, 0.9);
    const double alpha = 7.1175;
    OracleGrid g = oracle_grid(p, 20, 10, 1, alpha);
    OracleResult o = oracle_direct_uplink_at(p, g, alpha);
    ASSERT_TRUE(o.converged);
    double beta = o.multipliers.at(0), delta = o.multipliers.at(1);
    for (std::size_t i = 0; i < g.pieces.size(); ++i) {
        double expect = beta * g.pieces[i].t + (g.pieces[i].frustrated ? delta : 0.0);
        EXPECT_NEAR(std::log(o.ratio[i]), expect, 1e-8);
    }
    double total = 0;
    for (double w : g.masses()) total += w;
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Oracle, AgreesWithMinimizer) {
    RadialProblem p = hertz_problem(1.1, 0.9);
    MinimizerSolution s = minimize_direct_uplink(p);
    OracleSearch o = oracle_minimize_direct_uplink(p);
    EXPECT_NEAR(o.result.entropy, s.entropy, 1e-3 * s.entropy);
    EXPECT_NEAR(o.alpha, s.alpha_min, 0.05);
}
