#pragma once

#include <Eigen/Dense>

#include "glass/mde.hpp"
#include "glass/model.hpp"

namespace glass {

/// h_{p,q,gamma}(r,t), the entropy term of the two-point complexity. Also the
/// g_{p,q,gamma} of the key-lemma computation (the two are the same function).
double h_overlap(const ModelParams& params, const OverlapPoint& pt);

/// b_{p,q}(r,t), denominator of k; positive on (-1,1)^2 away from the origin.
double b_func(int p, int q, const OverlapPoint& pt);

/// k_{p,q}(r,t) = t^q r^p (1-r^{p-2} t^q)(1-r^p t^{q-2}) / b_{p,q}(r,t),
/// extended by k(0,0) = 0.
double k_func(int p, int q, const OverlapPoint& pt);

/// m_{p,q}(r,t) = (p-1)(1-r^2) t^2 + (q-1)(1-t^2) r^2.
double m_func(int p, int q, const OverlapPoint& pt);

/// kbar_{p,q}(r,t) = t^2 r^2 (1-r^{p-1} t^{q-1}) / (2 m_{p,q}(r,t)), the
/// upper bound on k furnished by the b simplification; kbar(0,0) = 0.
double kbar_func(int p, int q, const OverlapPoint& pt);

/// Q_{p,q,gamma}(r,t,E) = h + E^2 k. The key lemma states sup Q <= 0 over
/// (-1,1)^2 for p,q >= 10 and |E| <= E_th.
double q_func(const ModelParams& params, const OverlapPoint& pt, double E);

/// Qbar = h + E^2 kbar >= Q.
double qbar_func(const ModelParams& params, const OverlapPoint& pt, double E);

/// Boundary restriction Qbar_p(r) = Qbar_{p,*,1}(r, 1, E_th), in closed form:
/// log((1-r^2)/(1-r^{2p-2}))/2 + (log(p-1)/(p-1)) (1-r^{p-1}) r^2/(1-r^2).
double qbar_boundary(int p, double r);

/// Qhat_p(r) = -log(1+r^2)/2 + (log(p-1)/(p-1)) r^2/(1-r^2) >= Qbar_p(r).
double qhat(int p, double r);

/// Coefficient c with Qhat_10(r) <= c r^2 on [0, 0.61):
/// -log(1+0.61^2)/(2*0.61^2) + (log 9/9)/(1-0.61^2) = -0.036...
double qhat10_coefficient();

/// Psi(r,t,E1,E2) = h - (E1,E2) Sigma_E^{-1} (E1,E2)^t / 2 + Omega(E1) + Omega(E2).
/// sigma_E must be strictly positive definite.
double psi(const ModelParams& params, const SpectralMeasure& measure, const OverlapPoint& pt,
           double E1, double E2, const Eigen::Matrix2d& sigma_E);

/// Sigma_2 = 2 C + Psi.
double sigma2(const ModelParams& params, const SpectralMeasure& measure,
              const OverlapPoint& pt, double E1, double E2, const Eigen::Matrix2d& sigma_E);

/// Psi or Sigma_2 sampled over an (r,t) grid at fixed energies.
struct TwoPointSurface {
    ModelParams params;
    Eigen::ArrayXd r_grid;
    Eigen::ArrayXd t_grid;
    Eigen::MatrixXd values;      // values(i,j) at (r_grid[i], t_grid[j])
    double e1 = 0.0, e2 = 0.0;
    OverlapPoint argmax;
    double supremum = 0.0;
    double gap = 0.0;            // supremum - 2 Sigma(E), exact in Omega
};

/// Scans Sigma_2(r,t,E,E) over a symmetric grid containing the origin.
/// The gap supremum - 2 Sigma(E) is computed with the shared Omega terms
/// cancelled, so it carries no quadrature error.
TwoPointSurface sup_sigma2(const ModelParams& params, const SpectralMeasure& measure,
                           double E, int grid_res = 301, int workers = 0);

/// Max violations of the section-3 inequality chain on a [0,1)^2 grid, plus
/// the auxiliary sign facts. All entries should be <= 0 up to rounding.
struct InequalityChainReport {
    int p = 0, q = 0;
    double first_max_violation = 0.0;   // r^{p-2}t^{q-2} m - (1-r^{2p-2}t^{2q-2})
    double second_max_violation = 0.0;  // 2(1-r^{p-2}t^q)(1-r^p t^{q-2})/(1-r^{p-1}t^{q-1}) - sum
    double third_max_violation = 0.0;   // rhs - b
    double jbar22_max = 0.0;            // max of -r^2 - t^2 + 2 r^2 t^2 (should be <= 0)
    double lbar11_max_abs_dev = 0.0;    // max |lbar_{1,1} - 2 (r-t)^2|
};

InequalityChainReport verify_inequality_chain(int p, int q, int grid_res = 400);

/// Finite-N entropy term h_N(r,t); h_N / N -> h as N grows with N1/N -> gamma.
double finite_n_h(const ModelParams& params, int N1, int N2, const OverlapPoint& pt);

}  // namespace glass
