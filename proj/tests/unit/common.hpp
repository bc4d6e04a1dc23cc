#pragma once

#include <gtest/gtest.h>

#include <random>

#include "fadingld/fadingld.hpp"

namespace fl = fadingld;

inline fl::NetworkModel hertz_model(double qos_cap = 2.0) {
    return fl::NetworkModel(fl::Window::disk(1.0), fl::PathLoss::truncated_power(5.0, 4.0), fl::FadingLaw::uniform(1.0, 2.0),
                            fl::QosFunction::truncated_identity(qos_cap), fl::SpatialIntensity::uniform(1.0));
}

inline fl::NetworkModel constant_model(double k = 3.0, double fo = 1.5) {
    return fl::NetworkModel(fl::Window::disk(1.0), fl::PathLoss::constant(k), fl::FadingLaw::uniform(1.0, 2.0),
                            fl::QosFunction::truncated_identity(2.0), fl::SpatialIntensity::uniform(1.0),
                            fl::BaseFading::fixed(fo));
}

inline fl::NetworkModel box_model() {
    return fl::NetworkModel(fl::Window::box(2, 1.0), fl::PathLoss::truncated_power(4.0, 3.0),
                            fl::FadingLaw::uniform(1.0, 2.0), fl::QosFunction::truncated_identity(2.0),
                            fl::SpatialIntensity::uniform(2.0));
}

// Random atoms inside the window with fadings in [fmin, fmax].
inline fl::MarkedMeasure random_atoms(const fl::NetworkModel& m, std::mt19937_64& rng, int n, double wmin = 0.01,
                                      double wmax = 0.2) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    fl::MarkedMeasure nu(m.dim(), fl::MarkedMeasure::Repr::Atoms);
    const double r = m.window().r();
    for (int i = 0; i < n; ++i) {
        fl::Point x{};
        if (m.window().shape() == fl::Window::Shape::Disk2D) {
            double s = r * std::sqrt(U(rng)), th = 2 * M_PI * U(rng);
            x = {s * std::cos(th), s * std::sin(th), 0.0};
        } else {
            for (int k = 0; k < m.dim(); ++k) x[k] = r * (2 * U(rng) - 1);
        }
        nu.add(x, m.fmin() + (m.fmax() - m.fmin()) * U(rng), wmin + (wmax - wmin) * U(rng));
    }
    return nu;
}
