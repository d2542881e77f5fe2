#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "glass/mde.hpp"
#include "glass/model.hpp"
#include "glass/rng.hpp"

namespace glass {

/// Variance profile of a two-block symmetric Gaussian matrix. diag_boost
/// doubles the diagonal variance, the (1 + delta_ij) convention.
struct BlockMatrixSpec {
    int n1 = 0;
    int n2 = 0;
    double v11 = 0.0;
    double v12 = 0.0;
    double v22 = 0.0;
    bool diag_boost = true;

    void validate() const {
        if (n1 < 0 || n2 < 0 || n1 + n2 < 1)
            throw std::invalid_argument("BlockMatrixSpec: bad block sizes");
        if (v11 < 0.0 || v12 < 0.0 || v22 < 0.0)
            throw std::invalid_argument("BlockMatrixSpec: variances must be >= 0");
    }
};

/// Symmetric Gaussian matrix with the given block variances.
Eigen::MatrixXd sample_block_goe(const BlockMatrixSpec& spec, CounterRng& rng);

/// Variance profile of the Hessian-bulk matrix H_N^D for the model:
/// blocks (N1-1, N2-1) with entry variances (p-1)/(pN), 1/N, (q-1)/(qN) and
/// boosted diagonal, where N1 = round(gamma N).
BlockMatrixSpec hessian_bulk_spec(const ModelParams& params, int N);

struct SpectralMcResult {
    std::uint64_t seed = 0;
    int N = 0, N1 = 0, N2 = 0;
    int samples = 0;
    double w1 = 0.0;                  // distance of mean empirical spectrum to the model
    std::vector<double> quantiles;    // pooled eigenvalue deciles (0%,10%,...,100%)
    std::vector<double> eigenvalues;  // pooled, sorted
};

/// Samples H_N^D matrices, pools their spectra, and measures W1 against the
/// model measure. Deterministic for fixed (seed, N, samples) on any worker
/// count.
SpectralMcResult spectral_check(const ModelParams& params, const SpectralMeasure& measure,
                                int N, int samples, std::uint64_t seed, int workers = 0);

/// Dense coefficient tensor of the normalized field on unit spheres:
/// h(sigma, tau) = vec(sigma^{otimes p})^T J vec(tau^{otimes q}), J iid N(0,1).
struct HamiltonianTensor {
    int p = 0, q = 0;
    int n1 = 0, n2 = 0;
    Eigen::MatrixXd coeffs;  // n1^p rows, n2^q columns
};

/// Samples the coefficient tensor; throws if the dense tensor would exceed
/// the memory budget.
HamiltonianTensor sample_hamiltonian(int p, int q, int N1, int N2, std::uint64_t seed,
                                     std::size_t memory_budget_bytes = 512u << 20);

double hamiltonian_value(const HamiltonianTensor& T, const Eigen::VectorXd& sigma,
                         const Eigen::VectorXd& tau);

/// Euclidean gradients of h with respect to sigma and tau.
void hamiltonian_gradient(const HamiltonianTensor& T, const Eigen::VectorXd& sigma,
                          const Eigen::VectorXd& tau, Eigen::VectorXd& grad_sigma,
                          Eigen::VectorXd& grad_tau);

struct StepRule {
    double initial_step = 0.1;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    double grow = 2.0;
    double max_step = 1.0;
    double grad_tol = 1e-8;
    int max_iter = 5000;
};

struct RestartResult {
    double h_min = 0.0;       // minimal h_N found
    double grad_norm = 0.0;   // Riemannian gradient norm at the reported point
    int iterations = 0;
    bool converged = false;
    Eigen::VectorXd sigma;
    Eigen::VectorXd tau;
};

struct LandscapeResult {
    std::uint64_t seed = 0;
    int restarts = 0;
    std::vector<RestartResult> runs;  // indexed by restart, order fixed
    int best = -1;                    // index of the smallest h_min
    double best_h = 0.0;
    double best_h_over_sqrt_n = 0.0;  // implied min H / N
};

/// Projected gradient descent with Armijo backtracking on the product of unit
/// spheres (retraction = per-factor renormalization), from uniform random
/// starts. Restart k draws from stream (seed, k); deterministic for any
/// worker count.
LandscapeResult ground_state_search(const HamiltonianTensor& T, int restarts,
                                    std::uint64_t seed, const StepRule& rule = {},
                                    int workers = 0);

struct DetBoundReport {
    int n = 0;
    int instances = 0;
    std::vector<double> eps_values;
    int violations = 0;
    double max_log_lhs_minus_rhs = -1e300;  // max over samples of log LHS - log RHS
    double min_margin = 1e300;              // min of log RHS - log LHS
};

/// Deterministic check of |det M| <= W(eps) |det(G - E + i eps)| on random
/// block matrices with the lemma's shape (2x2 corner, coupling, bulk, -E).
/// Every instance must satisfy the bound; violations are reported, not thrown.
DetBoundReport det_bound_check(int n, const std::vector<double>& eps_values, int instances,
                               std::uint64_t seed, int workers = 0);

/// log W(eps)^2 for corner L (already shifted by -E), coupling V ((n-4) x 2)
/// and direction v.
double det_bound_log_w2(const Eigen::Matrix2d& L, const Eigen::MatrixXd& V,
                        const Eigen::Vector2d& v, double eps);

}  // namespace glass
