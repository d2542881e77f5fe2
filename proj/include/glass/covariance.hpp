#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glass/model.hpp"

namespace glass {

/// Chart coordinates of a point on the product of spheres, one block per
/// factor, used by the explicit covariance kernel. Norms must stay below 1.
struct SphereKernelPoint {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();  // first sphere factor
    Eigen::Vector3d y = Eigen::Vector3d::Zero();  // second sphere factor
};

/// rho_{r,N}(x,y) = sum_{i>=2} x_i y_i + r x_1 y_1 + r_* x_1 |y|_*
///                  - r_* y_1 |x|_* + r |x|_* |y|_*   with |x|_* = sqrt(1-|x|^2).
/// First argument lives in the chart at n, second in the chart at n(r,t).
double rho_kernel(double r, const Eigen::Vector3d& x, const Eigen::Vector3d& y);

/// C(a, b) = rho_r(a.x, b.x)^p rho_t(a.y, b.y)^q, the two-point covariance of
/// the rescaled field in the two charts.
double field_covariance(int p, int q, double r, double t, const SphereKernelPoint& a,
                        const SphereKernelPoint& b);

/// One derivative direction: which argument (0 = at n, 1 = at n(r,t)), which
/// sphere factor (0 or 1), and the 1-based chart coordinate (1 = pivot).
struct DerivDir {
    int arg = 0;
    int sphere = 0;
    int index = 1;
};

/// Covariance between derivatives of the field at the two base points, by
/// central finite differences of field_covariance at the chart origins with
/// two Richardson levels. Ground truth for the closed-form table; total
/// derivative order <= 2 per argument. The step balances the eps/h^4
/// roundoff of fourth-order stencils against the O(h^6) truncation.
double fd_covariance_oracle(int p, int q, double r, double t,
                            const std::vector<DerivDir>& dirs, double step = 2e-2);

/// Closed-form covariance table entry for the same derivative list (orders
/// up to Hessian x gradient). Throws for Hessian x Hessian, which the table
/// does not display.
double table_entry(int p, int q, double r, double t, const std::vector<DerivDir>& dirs);

struct TableEntry {
    std::string name;
    std::vector<DerivDir> dirs;
    double value = 0.0;
};

/// Every displayed table row evaluated at a representative index choice per
/// delta-pattern (pivot and non-pivot classes).
std::vector<TableEntry> derivative_covariance_table(int p, int q, double r, double t);

/// Covariance of the pivot gradients
/// (E_1 h(n), E^1 h(n), E_1 h(n(r,t)), E^1 h(n(r,t))).
Eigen::Matrix4d assemble_sigma_L(int p, int q, double r, double t);

/// det Sigma_L in closed form, p^2 q^2 (1 - r^{2p-4} t^{2q-4} b_1
/// + r^{4p-4} t^{4q-4} b_2^2) with b_2 = p(1-r^2) + q(1-t^2) - 1.
double det_sigma_L_closed(int p, int q, double r, double t);

/// f_L = 1 / ((2 pi)^2 sqrt(det Sigma_L)).
double f_L(int p, int q, double r, double t);

/// Conditional covariance of (h(n), h(n(r,t))) given the pivot gradients,
/// via the Schur complement against Sigma_L. Identity at the origin; throws
/// if Sigma_L is numerically singular (|r| or |t| -> 1).
Eigen::Matrix2d assemble_sigma_E(int p, int q, double r, double t);

/// The corner Hessian matrix displayed for det Sigma_L,
/// 8 p^2 q^2 [[q(3p-2), -3(p-1)(q-1)-2], [., p(3q-2)]].
Eigen::Matrix2d corner_hessian_display(int p, int q);

struct CornerVariance {
    double variance = 0.0;  // of E_1E_1 h(n) sqrt(1-r^2) + E_1E^1 h(n) sqrt(1-t^2),
                            // conditional on the pivot gradients
    double ratio = 0.0;     // variance / (2 - r^2 - t^2)^2
};

CornerVariance conditional_corner_variance(int p, int q, double r, double t);

/// Sigma_L, Sigma_E, f_L and the determinant cross-checks at one overlap.
struct CovarianceBundle {
    int p = 0, q = 0;
    OverlapPoint pt;
    Eigen::Matrix4d sigma_L;
    Eigen::Matrix2d sigma_E;
    Eigen::Matrix2d value_block;
    Eigen::Matrix<double, 2, 4> cross_block;
    double f_L_value = 0.0;
    double det_closed = 0.0;
};

CovarianceBundle make_covariance_bundle(int p, int q, double r, double t);

}  // namespace glass
