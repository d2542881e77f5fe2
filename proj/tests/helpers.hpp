#pragma once

#include <cmath>
#include <functional>

#include "glass/mde.hpp"

namespace glass::testing {

/// Analytic semicircle of variance s (support [-2 sqrt(s), 2 sqrt(s)])
/// sampled on a uniform grid; the exact limit measure for the collapsed
/// p = q, gamma = 1/2 models.
inline SpectralMeasure make_semicircle_measure(double s, int n_points = (1 << 20) + 1,
                                               double halfwidth_factor = 1.2) {
    SpectralMeasure m;
    m.params = ModelParams{3, 3, 0.5};
    double edge = 2.0 * std::sqrt(s);
    double half = halfwidth_factor * edge;
    m.grid = Eigen::ArrayXd::LinSpaced(n_points, -half, half);
    m.density.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        double x = m.grid[i];
        double u = 4.0 * s - x * x;
        m.density[i] = u > 0.0 ? std::sqrt(u) / (2.0 * M_PI * s) : 0.0;
    }
    m.density0 = m.density;
    m.density1 = m.density;
    m.edge = edge;
    m.eta_used = 0.0;
    return m;
}

/// Composite Simpson rule; n must be even.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Brute-force log-potential of the unit semicircle at E outside [-2,2],
/// via the smooth substitution x = 2 sin(theta).
inline double semicircle_log_potential_oracle(double E, int n = 200000) {
    return simpson(
        [E](double th) {
            double x = 2.0 * std::sin(th);
            double c = std::cos(th);
            return std::log(std::abs(x - E)) * (4.0 * c * c) / (2.0 * M_PI);
        },
        -M_PI / 2.0, M_PI / 2.0, n);
}

/// Stieltjes transform of the variance-s semicircle, Herglotz branch.
inline std::complex<double> semicircle_transform(std::complex<double> z, double s) {
    std::complex<double> w = std::sqrt(z * z - 4.0 * s);
    std::complex<double> m = (-z + w) / (2.0 * s);
    if (m.imag() < 0.0) m = (-z - w) / (2.0 * s);
    return m;
}

}  // namespace glass::testing
