#include "common.hpp"

using namespace fadingld;

TEST(PathLoss, TruncatedPowerValues) {
    PathLoss pl = PathLoss::truncated_power(5, 4);
    EXPECT_DOUBLE_EQ(pl(1.0), 1.0);
    EXPECT_DOUBLE_EQ(pl(0.5), 5.0);
    EXPECT_DOUBLE_EQ(pl(0.0), 5.0);
    EXPECT_NEAR(pl(2.0), 0.0625, 1e-15);
    EXPECT_THROW(pl(-0.1), DomainError);
}

TEST(PathLoss, ConstantAndTabulated) {
    EXPECT_DOUBLE_EQ(PathLoss::constant(3)(0.7), 3.0);
    PathLoss t = PathLoss::tabulated({0, 1, 2}, {4, 2, 1});
    EXPECT_DOUBLE_EQ(t(0.5), 3.0);
    auto [lo, hi] = extremal_path_loss(t, Window::disk(1.0));
    EXPECT_DOUBLE_EQ(lo, 1.0);
    EXPECT_DOUBLE_EQ(hi, 4.0);
}

TEST(PathLoss, ExtremalOnDisk) {
    auto [lo, hi] = extremal_path_loss(PathLoss::truncated_power(5, 4), Window::disk(1.0));
    EXPECT_NEAR(lo, 0.0625, 1e-15);
    EXPECT_DOUBLE_EQ(hi, 5.0);
    auto [a, b] = extremal_path_loss(PathLoss::constant(3), Window::box(3, 2.0));
    EXPECT_EQ(a, 3.0);
    EXPECT_EQ(b, 3.0);
}

TEST(PathLoss, LipschitzBoundOnSampledPairs) {
    PathLoss pl = PathLoss::truncated_power(5, 4);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0, 2);
    for (int i = 0; i < 2000; ++i) {
        double s = U(rng), t = U(rng);
        EXPECT_LE(std::abs(pl(s) - pl(t)), pl.lipschitz() * std::abs(s - t) * (1 + 1e-12) + 1e-15);
    }
}

TEST(FadingLaw, UniformBasics) {
    FadingLaw f = FadingLaw::uniform(1, 2);
    EXPECT_DOUBLE_EQ(f.mean(), 1.5);
    EXPECT_DOUBLE_EQ(f.cdf(1.25), 0.25);
    EXPECT_DOUBLE_EQ(f.quantile(0.5), 1.5);
    EXPECT_THROW(FadingLaw::uniform(0, 1), ModelError);
}

TEST(FadingLaw, AtomsNormalizeAndCdfBelow) {
    FadingLaw f = FadingLaw::atoms({3, 1}, {0.5, 0.5});
    EXPECT_DOUBLE_EQ(f.fmin(), 1.0);
    EXPECT_DOUBLE_EQ(f.cdf(1.0), 0.5);
    EXPECT_DOUBLE_EQ(f.cdf_below(1.0), 0.0);
    EXPECT_DOUBLE_EQ(f.mean(), 2.0);
    EXPECT_THROW(FadingLaw::atoms({1, 2}, {0.5, 0.4}), ModelError);
}

TEST(FadingLaw, TabulatedDensityNormalized) {
    FadingLaw f = FadingLaw::density({1, 2}, {1, 3});
    EXPECT_NEAR(f.cdf(2.0), 1.0, 1e-12);
    // density 0.5 + (u - 1), mean = integral of u f = 19/12
    EXPECT_NEAR(f.mean(), 19.0 / 12.0, 1e-12);
}

TEST(Qos, IdentityAndPlateau) {
    QosFunction g = QosFunction::truncated_identity(2.0);
    EXPECT_DOUBLE_EQ(g(0.4), 0.4);
    EXPECT_DOUBLE_EQ(g(3.0), 2.0);
    EXPECT_DOUBLE_EQ(g.sir_threshold(1.1), 1.1);
    QosFunction t = QosFunction::tabulated({0, 1, 2}, {0, 0.5, 1.0});
    EXPECT_DOUBLE_EQ(t.c_plus(), 1.0);
    EXPECT_DOUBLE_EQ(t(5.0), 1.0);
    EXPECT_DOUBLE_EQ(t.sir_threshold(0.75), 1.5);
}

TEST(Qos, StrictlyIncreasingBelowRho) {
    QosFunction t = QosFunction::tabulated({0, 1, 2}, {0, 0.5, 1.0});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 2);
    for (int i = 0; i < 500; ++i) {
        double a = U(rng), b = U(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        EXPECT_LT(t(a), t(b));
    }
}

TEST(ProductIntensity, MassAndFadingBand) {
    NetworkModel m(Window::box(2, 1.0), PathLoss::constant(1), FadingLaw::uniform(1, 2), QosFunction::truncated_identity(2),
                   SpatialIntensity::uniform(2.0));
    MarkedMeasure mu = product_intensity(m, {8, 8, 16});
    EXPECT_NEAR(mu.total_mass(), 2.0, 1e-12);
    double band = 0;
    for (const auto& a : mu.points())
        if (a.u <= 1.5) band += a.w;
    EXPECT_NEAR(band, 1.0, 1e-12);
}

TEST(ProductIntensity, RadialDensityMassPi) {
    NetworkModel m(Window::disk(1.0), PathLoss::constant(1), FadingLaw::uniform(1, 2), QosFunction::truncated_identity(2),
                   SpatialIntensity::radial_function([](double s) { return 2 * M_PI * s; }, 1.0));
    EXPECT_NEAR(product_intensity(m, {16, 16, 4}).total_mass(), M_PI, 1e-6);
    EXPECT_THROW(product_intensity(m, {0, 16, 4}), ParameterError);
}

TEST(NetworkModel, BaseFadingDefaultsToMidpoint) {
    NetworkModel m = hertz_model();
    EXPECT_DOUBLE_EQ(m.base_fading(), 1.5);
    EXPECT_THROW(m.with_base(2.5), ModelError);
    EXPECT_DOUBLE_EQ(m.with_base(1.2).base_fading(), 1.2);
}

TEST(Scenario, ParsesAllSections) {
    Scenario sc = parse_scenario(R"(
# comment line
[window]
shape = disk
r = 1   # trailing comment
[pathloss]
form = truncated_power
cap = 5
exponent = 4
[fading]
law = uniform
min = 1
max = 2
[qos]
form = identity
cap = 2
[intensity]
form = uniform
mass = 1
[base]
form = fixed
value = 1.25
)");
    EXPECT_DOUBLE_EQ(sc.model.base_fading(), 1.25);
    EXPECT_DOUBLE_EQ(sc.model.path_loss()(0.0), 5.0);
    EXPECT_THROW(parse_scenario("[bogus]\nx=1\n"), ModelError);
    EXPECT_THROW(parse_scenario("[window]\nshape = disk\nr = one\n"), ModelError);
}

TEST(Scenario, ShippedFilesLoad) {
    for (const char* f : {"hertz_disk.ini", "pathloss_free.ini", "random_base.ini", "box_atoms.ini"})
        EXPECT_NO_THROW(load_scenario(std::string(FADINGLD_SCENARIO_DIR) + "/" + f)) << f;
}
