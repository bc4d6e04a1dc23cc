#include <boost/math/tools/minima.hpp>

#include "common.hpp"

using namespace fadingld;

namespace {

DiscretizedMeasure base_measure(int level = 2) {
    NetworkModel m = box_model();
    return discretize_product_intensity(TriadicGrid::for_model(m, level), m);
}

DiscretizedMeasure random_reweight(const DiscretizedMeasure& mu, std::mt19937_64& rng, double lo = 0.1, double hi = 3.0) {
    std::uniform_real_distribution<double> U(lo, hi);
    DiscretizedMeasure nu(mu.grid());
    for (const auto& [k, w] : mu.masses()) nu.add(k, w * U(rng));
    return nu;
}

}  // namespace

TEST(HCell, Conventions) {
    EXPECT_EQ(h_cell(0, 2), 2.0);
    EXPECT_TRUE(std::isinf(h_cell(1, 0)));
    EXPECT_EQ(h_cell(0, 0), 0.0);
    EXPECT_THROW(h_cell(-1, 1), DomainError);
}

TEST(RelEntropyDiscrete, IdentityDoubleAndNullCell) {
    DiscretizedMeasure mu = base_measure();
    EXPECT_NEAR(mu.total_mass(), 2.0, 1e-12);
    DiscretizedMeasure p = mu.scaled(0.5);
    EXPECT_EQ(rel_entropy_discrete(p, p).value, 0.0);
    EXPECT_NEAR(rel_entropy_discrete(p.scaled(2.0), p).value, 0.386294361119890618, 1e-14);
    DiscretizedMeasure bad = p;
    bad.add(CellKey{99, 0, 0, 0}, 0.1);
    EXPECT_TRUE(rel_entropy_discrete(bad, p).is_infinite());
    EXPECT_THROW(rel_entropy_discrete(p, base_measure(3)), ParameterError);
}

TEST(RelEntropyDiscrete, NonnegativeZeroIffEqual) {
    DiscretizedMeasure mu = base_measure();
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        DiscretizedMeasure nu = random_reweight(mu, rng, 0.9, 1.1);
        EXPECT_GT(rel_entropy_discrete(nu, mu).value, 0.0);
    }
}

TEST(RelEntropyDensity, ConstantAndTilt) {
    NetworkModel m = box_model();
    TriadicGrid g = TriadicGrid::for_model(m, 2);
    MarkedMeasure mu = discretize_product_intensity(g, m).to_marked();
    std::vector<double> ones(mu.size(), 1.0), twos(mu.size(), 2.7);
    EXPECT_EQ(rel_entropy_density(ones, mu).value, 0.0);
    EXPECT_NEAR(rel_entropy_density(twos, mu).value, (2.7 * std::log(2.7) - 2.7 + 1) * 2.0, 1e-12);
    std::vector<double> neg(mu.size(), 1.0);
    neg[0] = -0.1;
    EXPECT_THROW(rel_entropy_density(neg, mu), DomainError);

    // exponential tilt in u: density form against cellwise form
    DiscretizedMeasure mud = discretize_product_intensity(g, m);
    std::vector<double> f;
    DiscretizedMeasure nu(g);
    for (const auto& [k, w] : mud.masses()) {
        if (!(w > 0)) continue;
        double v = 0.3 * std::exp(0.8 * g.center(k).u);
        f.push_back(v);
        nu.add(k, w * v);
    }
    EXPECT_NEAR(rel_entropy_density(f, mu).value, rel_entropy_discrete(nu, mud).value, 1e-6);
}

TEST(LinearPerturbation, ExactIdentity) {
    DiscretizedMeasure mu = base_measure();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> A(1e-3, 3.0);
    for (int t = 0; t < 200; ++t) {
        DiscretizedMeasure nu = random_reweight(mu, rng);
        double a = A(rng);
        double lhs = rel_entropy_discrete(nu.scaled(a), mu).value;
        double rhs = a * rel_entropy_discrete(nu, mu).value + a * std::log(a) * nu.total_mass() + (1 - a) * mu.total_mass();
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(LinearPerturbation, EpsilonBounds) {
    DiscretizedMeasure mu = base_measure();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> E(1e-4, 0.4999);
    for (int t = 0; t < 200; ++t) {
        DiscretizedMeasure nu = random_reweight(mu, rng, 0.01, 4.0);
        double e = E(rng), h = rel_entropy_discrete(nu, mu).value, M = mu.total_mass();
        EXPECT_LE(rel_entropy_discrete(nu.scaled(1 + e), mu).value, (1 + 3 * e) * h + 3 * e * M + 1e-12);
        EXPECT_GE(rel_entropy_discrete(nu.scaled(1 - e), mu).value, (1 - 3 * e) * h - 3 * e * M - 1e-12);
    }
}

TEST(Coarsening, EntropyDoesNotIncrease) {
    NetworkModel m = box_model();
    TriadicGrid fine = TriadicGrid::for_model(m, 3), coarse = TriadicGrid::for_model(m, 2);
    DiscretizedMeasure mu = discretize_product_intensity(fine, m);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        DiscretizedMeasure nu = random_reweight(mu, rng);
        double hf = rel_entropy_discrete(nu, mu).value;
        double hc = rel_entropy_discrete(pushforward(coarse, nu.to_marked()), pushforward(coarse, mu.to_marked())).value;
        EXPECT_GE(hf + 1e-12, hc);
    }
}

TEST(PoissonRate, ClosedFormsAndErrors) {
    EXPECT_EQ(poisson_rate(2.5, 2.5), 0.0);
    EXPECT_EQ(poisson_rate(0, 1.7), 1.7);
    EXPECT_NEAR(poisson_rate(3, 1), 1.29583686600432907, 1e-14);
    EXPECT_THROW(poisson_rate(1, 0), ParameterError);
}

TEST(PoissonRate, MatchesLegendreTransform) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> Y(0.01, 5), M(0.1, 5);
    for (int t = 0; t < 50; ++t) {
        double y = Y(rng), m = M(rng);
        auto neg = [&](double a) { return -(a * y + m * (1 - std::exp(a))); };
        auto [a, v] = boost::math::tools::brent_find_minima(neg, -30.0, 30.0, 60);
        EXPECT_NEAR(poisson_rate(y, m), -v, 1e-8);
    }
}
