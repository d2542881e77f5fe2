#include "glass/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "glass/parallel.hpp"
#include "glass/wasserstein.hpp"

namespace glass {

Eigen::MatrixXd sample_block_goe(const BlockMatrixSpec& spec, CounterRng& rng) {
    spec.validate();
    int n = spec.n1 + spec.n2;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double var;
            if (i < spec.n1 && j < spec.n1) var = spec.v11;
            else if (i >= spec.n1 && j >= spec.n1) var = spec.v22;
            else var = spec.v12;
            if (i == j && spec.diag_boost) var *= 2.0;
            double g = rng.next_gaussian() * std::sqrt(var);
            M(i, j) = g;
            M(j, i) = g;
        }
    }
    return M;
}

BlockMatrixSpec hessian_bulk_spec(const ModelParams& prm, int N) {
    prm.validate();
    if (N < 20) throw std::invalid_argument("hessian_bulk_spec: require N >= 20");
    int N1 = static_cast<int>(std::lround(prm.gamma * N));
    N1 = std::max(2, std::min(N - 2, N1));
    int N2 = N - N1;
    BlockMatrixSpec spec;
    spec.n1 = N1 - 1;
    spec.n2 = N2 - 1;
    spec.v11 = (prm.p - 1.0) / (prm.p * static_cast<double>(N));
    spec.v12 = 1.0 / static_cast<double>(N);
    spec.v22 = (prm.q - 1.0) / (prm.q * static_cast<double>(N));
    spec.diag_boost = true;
    return spec;
}

SpectralMcResult spectral_check(const ModelParams& prm, const SpectralMeasure& measure,
                                int N, int samples, std::uint64_t seed, int workers) {
    BlockMatrixSpec spec = hessian_bulk_spec(prm, N);
    int n = spec.n1 + spec.n2;

    std::vector<std::vector<double>> eigs(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), resolve_workers(workers),
                 [&](std::size_t s) {
                     CounterRng rng(seed, 0x5bec0000u + s);
                     Eigen::MatrixXd M = sample_block_goe(spec, rng);
                     Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                         M, Eigen::EigenvaluesOnly);
                     const auto& ev = es.eigenvalues();
                     eigs[s].assign(ev.data(), ev.data() + ev.size());
                 });

    SpectralMcResult res;
    res.seed = seed;
    res.N = N;
    res.N1 = spec.n1 + 1;
    res.N2 = spec.n2 + 1;
    res.samples = samples;
    res.eigenvalues.reserve(static_cast<std::size_t>(samples) * n);
    for (const auto& e : eigs) res.eigenvalues.insert(res.eigenvalues.end(), e.begin(), e.end());
    std::sort(res.eigenvalues.begin(), res.eigenvalues.end());
    res.w1 = w1_empirical_vs_measure(res.eigenvalues, measure);
    for (int d = 0; d <= 10; ++d) {
        std::size_t k = std::min(res.eigenvalues.size() - 1,
                                 static_cast<std::size_t>(d * (res.eigenvalues.size() - 1) / 10));
        res.quantiles.push_back(res.eigenvalues[k]);
    }
    return res;
}

HamiltonianTensor sample_hamiltonian(int p, int q, int N1, int N2, std::uint64_t seed,
                                     std::size_t memory_budget_bytes) {
    if (p < 1 || q < 1 || N1 < 2 || N2 < 2)
        throw std::invalid_argument("sample_hamiltonian: bad arguments");
    double cells = std::pow(static_cast<double>(N1), p) * std::pow(static_cast<double>(N2), q);
    if (cells * sizeof(double) > static_cast<double>(memory_budget_bytes)) {
        std::ostringstream msg;
        msg << "sample_hamiltonian: dense tensor needs " << cells * sizeof(double)
            << " bytes, over the budget of " << memory_budget_bytes
            << "; use smaller (p, q, N)";
        throw std::invalid_argument(msg.str());
    }
    HamiltonianTensor T;
    T.p = p;
    T.q = q;
    T.n1 = N1;
    T.n2 = N2;
    Eigen::Index rows = static_cast<Eigen::Index>(pow_i(N1, p));
    Eigen::Index cols = static_cast<Eigen::Index>(pow_i(N2, q));
    T.coeffs.resize(rows, cols);
    CounterRng rng(seed, 0x7a115eedULL);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) T.coeffs(i, j) = rng.next_gaussian();
    return T;
}

namespace {

// vec(x^{otimes k}), index order compatible with coeffs(i1 + n*(i2 + ...)).
Eigen::VectorXd tensor_power(const Eigen::VectorXd& x, int k) {
    Eigen::VectorXd out = Eigen::VectorXd::Ones(1);
    for (int rep = 0; rep < k; ++rep) {
        Eigen::VectorXd next(out.size() * x.size());
        Eigen::Index pos = 0;
        for (Eigen::Index i = 0; i < out.size(); ++i)
            for (Eigen::Index j = 0; j < x.size(); ++j) next[pos++] = out[i] * x[j];
        out.swap(next);
    }
    return out;
}

// Gradient of <vec(x^{otimes k}), u> with respect to x; u is a dense k-tensor
// over x's index space (not symmetric, so every slot is contracted).
Eigen::VectorXd slot_sum_gradient(const Eigen::VectorXd& u, const Eigen::VectorXd& x, int k) {
    int n = static_cast<int>(x.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    for (int slot = 0; slot < k; ++slot) {
        // Contract u with x over every stride class except n^slot, from the
        // slowest stride down so remaining strides stay valid.
        Eigen::VectorXd cur = u;
        for (int idx = k - 1; idx >= 0; --idx) {
            if (idx == slot) continue;
            Eigen::Index outer = pow_i(n, idx);              // block count below idx
            Eigen::Index inner = cur.size() / (outer * n);   // strides above idx
            Eigen::VectorXd next(outer * inner);
            for (Eigen::Index b = 0; b < inner; ++b)
                for (Eigen::Index a = 0; a < outer; ++a) {
                    double acc = 0.0;
                    for (int j = 0; j < n; ++j)
                        acc += cur[a + outer * (j + static_cast<Eigen::Index>(n) * b)] * x[j];
                    next[a + outer * b] = acc;
                }
            cur.swap(next);
        }
        grad += cur;
    }
    return grad;
}

}  // namespace

double hamiltonian_value(const HamiltonianTensor& T, const Eigen::VectorXd& sigma,
                         const Eigen::VectorXd& tau) {
    Eigen::VectorXd tq = tensor_power(tau, T.q);
    Eigen::VectorXd sp = tensor_power(sigma, T.p);
    return sp.dot(T.coeffs * tq);
}

void hamiltonian_gradient(const HamiltonianTensor& T, const Eigen::VectorXd& sigma,
                          const Eigen::VectorXd& tau, Eigen::VectorXd& grad_sigma,
                          Eigen::VectorXd& grad_tau) {
    Eigen::VectorXd tq = tensor_power(tau, T.q);
    Eigen::VectorXd sp = tensor_power(sigma, T.p);
    Eigen::VectorXd u = T.coeffs * tq;              // p-tensor over sigma indices
    Eigen::VectorXd v = T.coeffs.transpose() * sp;  // q-tensor over tau indices
    grad_sigma = slot_sum_gradient(u, sigma, T.p);
    grad_tau = slot_sum_gradient(v, tau, T.q);
}

namespace {

struct State {
    Eigen::VectorXd sigma, tau;
    double value = 0.0;
    Eigen::VectorXd u;                 // coeffs * tau^{otimes q}, reused for grad_sigma
    Eigen::VectorXd rg_sigma, rg_tau;  // Riemannian gradients
    double rg_norm = 0.0;
};

// Value plus the tau-side contraction (the expensive GEMV), for reuse.
double value_and_u(const HamiltonianTensor& T, const Eigen::VectorXd& sigma,
                   const Eigen::VectorXd& tau, Eigen::VectorXd& u) {
    u.noalias() = T.coeffs * tensor_power(tau, T.q);
    return tensor_power(sigma, T.p).dot(u);
}

// Riemannian gradients at the current point; one extra GEMV for the tau side.
void refresh_gradient(const HamiltonianTensor& T, State& s) {
    Eigen::VectorXd sp = tensor_power(s.sigma, T.p);
    Eigen::VectorXd v = T.coeffs.transpose() * sp;
    Eigen::VectorXd gs = slot_sum_gradient(s.u, s.sigma, T.p);
    Eigen::VectorXd gt = slot_sum_gradient(v, s.tau, T.q);
    s.rg_sigma = gs - gs.dot(s.sigma) * s.sigma;
    s.rg_tau = gt - gt.dot(s.tau) * s.tau;
    s.rg_norm = std::sqrt(s.rg_sigma.squaredNorm() + s.rg_tau.squaredNorm());
}

RestartResult run_descent(const HamiltonianTensor& T, CounterRng& rng, const StepRule& rule) {
    State s;
    s.sigma.resize(T.n1);
    s.tau.resize(T.n2);
    for (int i = 0; i < T.n1; ++i) s.sigma[i] = rng.next_gaussian();
    for (int i = 0; i < T.n2; ++i) s.tau[i] = rng.next_gaussian();
    s.sigma.normalize();
    s.tau.normalize();
    s.value = value_and_u(T, s.sigma, s.tau, s.u);
    refresh_gradient(T, s);

    double step = rule.initial_step;
    double last_accepted = rule.initial_step;
    int it = 0;
    Eigen::VectorXd trial_u;
    for (; it < rule.max_iter && s.rg_norm > rule.grad_tol; ++it) {
        double g2 = s.rg_sigma.squaredNorm() + s.rg_tau.squaredNorm();
        bool accepted = false;
        while (step >= 1e-16) {
            Eigen::VectorXd ns = (s.sigma - step * s.rg_sigma).normalized();
            Eigen::VectorXd nt = (s.tau - step * s.rg_tau).normalized();
            double nv = value_and_u(T, ns, nt, trial_u);
            // Strict decrease: once c s |g|^2 rounds away against |h| the
            // certificate is void and the polish phase below takes over.
            if (nv < s.value && nv <= s.value - rule.armijo_c * step * g2) {
                s.sigma.swap(ns);
                s.tau.swap(nt);
                s.value = nv;
                s.u.swap(trial_u);
                refresh_gradient(T, s);
                last_accepted = step;
                step = std::min(step * rule.grow, rule.max_step);
                accepted = true;
                break;
            }
            step *= rule.shrink;
        }
        if (!accepted) break;  // no certifiable decrease left
    }

    // The Armijo certificate saturates once the required decrease
    // c s |g|^2 drops under the rounding noise of the value itself (|g|
    // around sqrt(eps |h|), a few 1e-8 here). Finish with fixed-step
    // moves judged by the gradient norm alone.
    double sp = std::clamp(last_accepted, 1e-4, rule.max_step);
    for (int polish = 0; polish < 200 && s.rg_norm > rule.grad_tol; ++polish, ++it) {
        State trial;
        trial.sigma = (s.sigma - sp * s.rg_sigma).normalized();
        trial.tau = (s.tau - sp * s.rg_tau).normalized();
        trial.value = value_and_u(T, trial.sigma, trial.tau, trial.u);
        refresh_gradient(T, trial);
        if (trial.rg_norm < s.rg_norm) {
            s = std::move(trial);
            sp = std::min(sp * 1.25, rule.max_step);
        } else {
            sp *= 0.5;
            if (sp < 1e-12) break;
        }
    }

    RestartResult out;
    out.h_min = s.value;
    out.grad_norm = s.rg_norm;
    out.iterations = it;
    out.converged = s.rg_norm <= rule.grad_tol;
    out.sigma = s.sigma;
    out.tau = s.tau;
    return out;
}

}  // namespace

LandscapeResult ground_state_search(const HamiltonianTensor& T, int restarts,
                                    std::uint64_t seed, const StepRule& rule, int workers) {
    LandscapeResult res;
    res.seed = seed;
    res.restarts = restarts;
    res.runs.resize(static_cast<std::size_t>(restarts));
    parallel_for(static_cast<std::size_t>(restarts), resolve_workers(workers),
                 [&](std::size_t k) {
                     CounterRng rng(seed, 0x9d00d5ebULL + k);
                     res.runs[k] = run_descent(T, rng, rule);
                 });
    for (int k = 0; k < restarts; ++k)
        if (res.best < 0 || res.runs[static_cast<std::size_t>(k)].h_min < res.best_h) {
            res.best = k;
            res.best_h = res.runs[static_cast<std::size_t>(k)].h_min;
        }
    double N = T.n1 + T.n2;
    res.best_h_over_sqrt_n = res.best_h / std::sqrt(N);
    return res;
}

double det_bound_log_w2(const Eigen::Matrix2d& L, const Eigen::MatrixXd& V,
                        const Eigen::Vector2d& v, double eps) {
    double inv_eps2 = 1.0 / (eps * eps);
    double v_hs2 = V.squaredNorm();
    double l_hs2 = L.squaredNorm();
    double vv2 = (V * v).squaredNorm();
    double lv2 = (L * v).squaredNorm();
    double first = inv_eps2 * v_hs2 * v_hs2 + l_hs2;
    double second = inv_eps2 * vv2 * v_hs2 + lv2;
    return std::log(32.0 / v.squaredNorm()) + std::log(first) + std::log(second);
}

DetBoundReport det_bound_check(int n, const std::vector<double>& eps_values, int instances,
                               std::uint64_t seed, int workers) {
    if (n < 6) throw std::invalid_argument("det_bound_check: require n >= 6");
    if (eps_values.empty()) throw std::invalid_argument("det_bound_check: no eps values");
    int bulk = n - 4;
    int total = n - 2;

    struct Sample {
        double worst_diff = -1e300;  // max over eps of log LHS - log RHS
    };
    std::vector<Sample> out(static_cast<std::size_t>(instances));

    parallel_for(static_cast<std::size_t>(instances), resolve_workers(workers),
                 [&](std::size_t k) {
                     CounterRng rng(seed, 0xde7b0000ULL + k);
                     Eigen::Matrix2d L0;
                     double l01 = rng.next_gaussian();
                     L0 << rng.next_gaussian(), l01, l01, rng.next_gaussian();
                     Eigen::MatrixXd V(bulk, 2);
                     for (int j = 0; j < 2; ++j)
                         for (int i = 0; i < bulk; ++i) V(i, j) = rng.next_gaussian();
                     Eigen::MatrixXd G0(bulk, bulk);
                     double scale = 1.0 / std::sqrt(static_cast<double>(bulk));
                     for (int i = 0; i < bulk; ++i)
                         for (int j = i; j < bulk; ++j) {
                             double g = rng.next_gaussian() * scale;
                             G0(i, j) = g;
                             G0(j, i) = g;
                         }
                     double E = 4.0 * rng.next_uniform() - 2.0;
                     Eigen::Vector2d v;
                     do {
                         v << rng.next_gaussian(), rng.next_gaussian();
                     } while (v.norm() < 1e-8);

                     Eigen::MatrixXd M(total, total);
                     M.topLeftCorner(2, 2) = L0;
                     M.topRightCorner(2, bulk) = V.transpose();
                     M.bottomLeftCorner(bulk, 2) = V;
                     M.bottomRightCorner(bulk, bulk) = G0;
                     M -= E * Eigen::MatrixXd::Identity(total, total);

                     Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esM(M,
                                                                        Eigen::EigenvaluesOnly);
                     double log_lhs = 0.0;
                     for (int i = 0; i < total; ++i)
                         log_lhs += std::log(std::abs(esM.eigenvalues()[i]));

                     Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esG(G0,
                                                                        Eigen::EigenvaluesOnly);
                     Eigen::Matrix2d L = L0 - E * Eigen::Matrix2d::Identity();

                     double worst = -1e300;
                     for (double eps : eps_values) {
                         double log_det_g = 0.0;
                         for (int i = 0; i < bulk; ++i) {
                             double lam = esG.eigenvalues()[i] - E;
                             log_det_g += 0.5 * std::log(lam * lam + eps * eps);
                         }
                         double log_rhs = 0.5 * det_bound_log_w2(L, V, v, eps) + log_det_g;
                         worst = std::max(worst, log_lhs - log_rhs);
                     }
                     out[k].worst_diff = worst;
                 });

    DetBoundReport rep;
    rep.n = n;
    rep.instances = instances;
    rep.eps_values = eps_values;
    for (const auto& s : out) {
        if (s.worst_diff > 0.0) ++rep.violations;
        rep.max_log_lhs_minus_rhs = std::max(rep.max_log_lhs_minus_rhs, s.worst_diff);
        rep.min_margin = std::min(rep.min_margin, -s.worst_diff);
    }
    return rep;
}

}  // namespace glass
