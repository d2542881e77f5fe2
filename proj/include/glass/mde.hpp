#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "glass/model.hpp"

namespace glass {

using Complex = std::complex<double>;

/// Solution of the two-component Dyson system at one spectral parameter.
struct StieltjesPair {
    Complex z;
    Complex m0;
    Complex m1;
    double residual = 0.0;  // max norm of the two defining-equation residuals
    int iterations = 0;
};

struct MdeOptions {
    double tol = 1e-12;       // residual tolerance
    int max_iter = 200000;
    double damping = 0.5;     // m <- (1-a) m + a F(m)
};

/// Residuals of the defining equations at (m0, m1); max norm of the two.
double mde_residual(const ModelParams& params, Complex z, Complex m0, Complex m1);

/// Solves the Dyson system at z (Im z > 0) by damped fixed-point iteration,
/// optionally warm-started. Returns the Herglotz solution (Im m_i > 0).
/// Throws ConvergenceError on failure, std::invalid_argument if Im z <= 0.
StieltjesPair solve_mde_point(const ModelParams& params, Complex z,
                              const MdeOptions& opts = {},
                              std::optional<StieltjesPair> warm = std::nullopt);

/// Gridded density of mu_{p,q,gamma} together with its component measures.
struct SpectralMeasure {
    ModelParams params;
    Eigen::ArrayXd grid;      // strictly increasing abscissae
    Eigen::ArrayXd density;   // d mu_{p,q,gamma} / dx
    Eigen::ArrayXd density0;  // d mu_{p,q,0} / dx
    Eigen::ArrayXd density1;  // d mu_{p,q,1} / dx
    double edge = 0.0;        // right edge of the support
    double eta_used = 0.0;    // smallest regularization in the schedule

    double trapezoid_mass() const;       // of the combined density
    double trapezoid_mass(int which) const;  // which = 0 or 1 for components
};

enum class MdeSweep {
    continuation,    // warm start along the grid, left to right
    parallel_cold,   //every point from -1/z, grid points independent
};

struct DensityOptions {
    std::vector<double> eta_schedule = default_eta_schedule();
    MdeOptions mde = {};
    MdeSweep sweep = MdeSweep::continuation;
    int workers = 0;                 // 0 = resolve from env/hardware
    double edge_threshold = 1e-6;

    /// Decreasing etas; the density is Richardson-extrapolated to eta -> 0
    /// through the three smallest values.
    static std::vector<double> default_eta_schedule();
};

/// Covering half-width 2 sqrt(gamma (p-1)/p + (1-gamma)(q-1)/q + 1), always
/// to the right of the support edge.
double covering_radius(const ModelParams& params);

/// Symmetric grid of n points on [-1.2 R, 1.2 R] with R = covering_radius.
Eigen::ArrayXd default_grid(const ModelParams& params, int n = 2001);

/// Stieltjes inversion of the Dyson system over x_grid.
SpectralMeasure spectral_density(const ModelParams& params, const Eigen::ArrayXd& x_grid,
                                 const DensityOptions& opts = {});

/// Right support edge: outermost threshold crossing of the extrapolated
/// density, refined by bisection on Im m(x + i eta) with eta extrapolation.
double support_edge(const ModelParams& params, const SpectralMeasure& measure,
                    double density_threshold = 1e-6, const DensityOptions& opts = {});

}  // namespace glass
