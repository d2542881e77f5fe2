#pragma once

#include <vector>

#include <Eigen/Core>

#include "glass/mde.hpp"
#include "glass/model.hpp"

namespace glass {

/// Log-potential of the standard semicircle on [-2, 2]:
/// E^2/4 - 1/2 for |E| < 2, minus (|E|/4) sqrt(E^2-4) - log((|E|+sqrt(E^2-4))/2)
/// for |E| >= 2.
double omega_sc(double E);

/// C_{p,q,gamma} = (1 + gamma log(p/gamma) + (1-gamma) log(q/(1-gamma))) / 2.
double constant_C(const ModelParams& params);

/// E_th = sqrt(2 (gamma log(p-1) + (1-gamma) log(q-1))); zero when p = q = 2.
double threshold_eth(const ModelParams& params);

/// Log-potential Omega(E) = int log|x - E| d mu(x) by trapezoid quadrature.
/// The density is normalized to unit mass; inside the support the log
/// singularity is subtracted and integrated in closed form.
double log_potential(const SpectralMeasure& measure, double E);

/// Omega_eps(E) = int log|x - E + i eps| d mu(x), eps > 0.
double regularized_log_potential(const SpectralMeasure& measure, double E, double eps);

/// Theta = -E^2/2 + Omega(E).
double theta(const ModelParams& params, const SpectralMeasure& measure, double E);

/// Sigma = C + Theta.
double sigma(const ModelParams& params, const SpectralMeasure& measure, double E);

/// Sigma(E) <= C + gamma Omega_sc(E sqrt(p/((p-1) gamma)))
///             + (1-gamma) Omega_sc(E sqrt(q/((q-1)(1-gamma)))) - E^2/2.
double sigma_upper_bound(const ModelParams& params, double E);

/// f(gamma, E) = gamma/(E/sqrt(gamma) - 2) + (1-gamma)/(E/sqrt(1-gamma) - 2),
/// defined for E > 2 max(sqrt(gamma), sqrt(1-gamma)); endpoint values by limit.
double f_gamma(double gamma, double E);

/// Hat-Sigma_gamma(E) with the fixed 96/95 rescaling inside Omega_sc.
double sigma_hat(double gamma, double E);

struct RootOptions {
    double scan_step = 1e-2;
    double scan_start_offset = 1e-4;  // scan starts at e_inf + offset
    double scan_limit = 20.0;
    double sigma_tol = 1e-9;          // |Sigma| at the returned root
};

/// Smallest E > e_inf with Sigma(E) = 0 (Sigma is even, so Sigma(-E0) = 0 and
/// Sigma < 0 left of -E0). Sign-change scan plus bisection. Throws if no sign
/// change is found, reporting the scanned bracket.
double find_e0(const ModelParams& params, const SpectralMeasure& measure, double e_inf,
               const RootOptions& opts = {});

/// All sign-change brackets of Sigma on the scan range (diagnostic for the
/// uniqueness of the zero).
std::vector<std::pair<double, double>> sigma_sign_changes(const ModelParams& params,
                                                          const SpectralMeasure& measure,
                                                          double e_inf,
                                                          const RootOptions& opts = {});

struct ComplexityReport {
    ModelParams params;
    Eigen::ArrayXd e_grid;
    Eigen::ArrayXd sigma;
    Eigen::ArrayXd omega;
    Eigen::ArrayXd upper_bound;
    double e_inf = 0.0;
    double e_zero = 0.0;
    double e_th = 0.0;
    double c_const = 0.0;
    std::vector<std::pair<double, double>> sign_changes;
};

/// Full Sigma(E) curve with thresholds; e_grid defaults to 801 symmetric
/// points spanning past max(e_zero, e_th).
ComplexityReport build_complexity_report(const ModelParams& params,
                                         const SpectralMeasure& measure,
                                         int grid_points = 801);

}  // namespace glass
