#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "glass/mde.hpp"

namespace glass {

/// W1 between an empirical measure (uniform on `samples`, need not be sorted)
/// and a gridded density, by quantile coupling: average |Q_emp(u) - Q_model(u)|
/// over u = (k - 1/2)/K. Exact for both measures up to grid resolution.
inline double w1_empirical_vs_measure(std::vector<double> samples, const SpectralMeasure& m,
                                      int quantile_points = 10000) {
    if (samples.empty()) throw std::invalid_argument("w1: no samples");
    std::sort(samples.begin(), samples.end());

    // Model CDF on the grid (trapezoid cumulative, normalized to end at 1).
    const auto& x = m.grid;
    const auto& rho = m.density;
    std::vector<double> cdf(static_cast<std::size_t>(x.size()), 0.0);
    for (Eigen::Index i = 1; i < x.size(); ++i)
        cdf[static_cast<std::size_t>(i)] =
            cdf[static_cast<std::size_t>(i - 1)] +
            0.5 * (x[i] - x[i - 1]) * (rho[i] + rho[i - 1]);
    double total = cdf.back();
    if (!(total > 0.0)) throw std::invalid_argument("w1: measure has no mass");
    for (auto& c : cdf) c /= total;

    auto model_quantile = [&](double u) {
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.begin()) return x[0];
        if (it == cdf.end()) return x[x.size() - 1];
        std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
        double c0 = cdf[hi - 1], c1 = cdf[hi];
        double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
        return x[static_cast<Eigen::Index>(hi - 1)] +
               w * (x[static_cast<Eigen::Index>(hi)] - x[static_cast<Eigen::Index>(hi - 1)]);
    };
    auto empirical_quantile = [&](double u) {
        std::size_t k = static_cast<std::size_t>(u * static_cast<double>(samples.size()));
        if (k >= samples.size()) k = samples.size() - 1;
        return samples[k];
    };

    double acc = 0.0;
    for (int k = 0; k < quantile_points; ++k) {
        double u = (k + 0.5) / quantile_points;
        acc += std::abs(empirical_quantile(u) - model_quantile(u));
    }
    return acc / quantile_points;
}

}  // namespace glass
