#include "common.hpp"

using namespace fadingld;

TEST(TriadicGrid, OriginIsCenterAndFixedPoints) {
    NetworkModel m = hertz_model();
    TriadicGrid g = TriadicGrid::for_model(m, 3);
    MarkedPoint o{origin, m.base_fading()};
    auto c = g.discretize(o);
    EXPECT_EQ(c.x, origin);
    EXPECT_EQ(c.u, m.base_fading());
    CellKey k{2, -3, 0, 1};
    auto ctr = g.center(k);
    EXPECT_EQ(g.key_of(ctr), k);
}

TEST(TriadicGrid, TieGoesToSmallerCenter) {
    TriadicGrid g(Window::box(1, 1.0), 1.0, 2.0, 1.5, 1);
    // spatial step 2/3: the midpoint 1/3 between centers 0 and 2/3 goes to 0
    EXPECT_EQ(g.key_of({Point{1.0 / 3.0, 0, 0}, 1.5})[0], 0);
    EXPECT_EQ(g.key_of({Point{-1.0 / 3.0, 0, 0}, 1.5})[0], -1);
    EXPECT_THROW(g.key_of({Point{1.5, 0, 0}, 1.5}), DomainError);
    EXPECT_THROW(g.key_of({Point{0, 0, 0}, 2.5}), DomainError);
}

TEST(TriadicGrid, DiskCentersStayInside) {
    NetworkModel m = hertz_model();
    TriadicGrid g = TriadicGrid::for_model(m, 2);
    std::mt19937_64 rng(1);
    MarkedMeasure nu = random_atoms(m, rng, 2000);
    for (const auto& a : nu.points()) EXPECT_TRUE(m.window().contains(g.discretize({a.x, a.u}).x, 1e-9));
}

TEST(Pushforward, MassConservedExactly) {
    NetworkModel m = box_model();
    std::mt19937_64 rng(2);
    for (int level = 0; level <= 4; ++level) {
        MarkedMeasure nu = random_atoms(m, rng, 300);
        DiscretizedMeasure d = pushforward(TriadicGrid::for_model(m, level), nu);
        CompensatedSum s;
        for (const auto& a : nu.points()) s += a.w;
        EXPECT_EQ(d.total_mass(), DiscretizedMeasure(d).total_mass());
        EXPECT_NEAR(d.total_mass(), s.value(), 1e-13);
    }
    EXPECT_EQ(pushforward(TriadicGrid::for_model(m, 2), MarkedMeasure(2)).masses().size(), 0u);
}

TEST(Pushforward, SingleAtomAndIdempotent) {
    NetworkModel m = hertz_model();
    TriadicGrid g = TriadicGrid::for_model(m, 3);
    MarkedMeasure one(2);
    one.add({0.3, 0.2, 0}, 1.7, 0.25);
    DiscretizedMeasure d = pushforward(g, one);
    ASSERT_EQ(d.masses().size(), 1u);
    EXPECT_EQ(d.masses().begin()->second, 0.25);
    std::mt19937_64 rng(3);
    DiscretizedMeasure a = pushforward(g, random_atoms(m, rng, 200));
    DiscretizedMeasure b = pushforward(g, a.to_marked());
    EXPECT_EQ(a.masses(), b.masses());
}

TEST(Pushforward, NestedGridsCompose) {
    for (const NetworkModel& m : {box_model(), hertz_model()}) {
        std::mt19937_64 rng(4);
        MarkedMeasure nu = random_atoms(m, rng, 1000);
        for (int level = 1; level <= 4; ++level) {
            TriadicGrid coarse = TriadicGrid::for_model(m, level), fine = TriadicGrid::for_model(m, level + 1);
            for (const auto& a : nu.points()) {
                MarkedPoint p{a.x, a.u};
                if (m.window().shape() == Window::Shape::Disk2D) {
                    // the disk fallback moves border cells, nesting is checked on interior points only
                    if (norm(a.x) > 1.0 - 2 * coarse.spatial_step()) continue;
                }
                EXPECT_EQ(coarse.key_of(fine.discretize(p)), coarse.key_of(p));
            }
        }
    }
}

TEST(Kappa, UniformCellsAndZeroCells) {
    NetworkModel m(Window::box(1, 1.0), PathLoss::constant(1), FadingLaw::atoms({1.5}, {1.0}),
                   QosFunction::truncated_identity(2), SpatialIntensity::uniform(2.0));
    TriadicGrid g = TriadicGrid::for_model(m, 2);
    DiscretizedMeasure mu = discretize_product_intensity(g, m);
    EXPECT_EQ(mu.masses().size(), 9u);
    EXPECT_NEAR(kappa_delta(mu), 2.0 / 9.0, 1e-15);
    mu.add(CellKey{0, 0, 0, 0}, 0.0);
    DiscretizedMeasure z(g);
    z.add(CellKey{0, 0, 0, 0}, 0.0);
    EXPECT_THROW(kappa_delta(z), ParameterError);
}

TEST(Kappa, ShrinksWithDelta) {
    NetworkModel m = hertz_model();
    double prev = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= 3; ++level) {
        DiscretizedMeasure mu = discretize_product_intensity(TriadicGrid::for_model(m, level), m);
        EXPECT_NEAR(mu.total_mass(), 1.0, 1e-8);
        double k = kappa_delta(mu);
        EXPECT_LT(k, prev);
        prev = k;
    }
}

TEST(Sandwich, HoldsAtFinestLevel) {
    // G((1-e) nu', c, m) <= G(nu, c, m)' <= G((1+e) nu', c, m) cellwise
    NetworkModel m = hertz_model();
    std::mt19937_64 rng(9);
    const int level = 5;
    TriadicGrid g = TriadicGrid::for_model(m, level);
    for (int t = 0; t < 5; ++t) {
        MarkedMeasure nu = random_atoms(m, rng, 20, 0.02, 0.1);
        DiscretizedMeasure d = pushforward(g, nu);
        MarkedMeasure dm = d.to_marked();
        for (double eps : {0.1, 0.2})
            for (Mode mode : all_modes) {
                double c = 0.6;
                DiscretizedMeasure mid = pushforward(g, frustration_measure(m, nu, c, mode));
                DiscretizedMeasure lo = pushforward(g, frustration_measure(m, dm.scaled(1 - eps), c, mode));
                DiscretizedMeasure hi = pushforward(g, frustration_measure(m, dm.scaled(1 + eps), c, mode));
                for (const auto& [k, w] : d.masses()) {
                    EXPECT_LE(lo.mass(k), mid.mass(k) + 1e-15) << to_string(mode);
                    EXPECT_LE(mid.mass(k), hi.mass(k) + 1e-15) << to_string(mode);
                }
            }
    }
}
