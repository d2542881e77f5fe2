#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace glass {

/// The triple (p, q, gamma) defining the bipartite pure (p,q)-spin model.
struct ModelParams {
    int p = 2;
    int q = 2;
    double gamma = 0.5;

    void validate() const {
        if (p < 2 || q < 2)
            throw std::invalid_argument("ModelParams: require p >= 2 and q >= 2");
        if (!(gamma > 0.0) || !(gamma < 1.0))
            throw std::invalid_argument("ModelParams: require 0 < gamma < 1");
    }

    /// The model is invariant under (p,q,gamma) -> (q,p,1-gamma).
    ModelParams swapped() const { return ModelParams{q, p, 1.0 - gamma}; }
};

/// Overlap coordinates (r, t) of a configuration pair, one per sphere factor.
struct OverlapPoint {
    double r = 0.0;
    double t = 0.0;

    void validate() const {
        if (!(std::abs(r) < 1.0) || !(std::abs(t) < 1.0))
            throw std::invalid_argument("OverlapPoint: require |r| < 1 and |t| < 1");
    }
};

/// Thrown when an iterative solver fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

/// Exact integer power; pow_i(0,0) == 1 to match the polynomial convention.
inline double pow_i(double x, int n) {
    if (n < 0) return 1.0 / pow_i(x, -n);
    double acc = 1.0, base = x;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

}  // namespace glass
