#include "glass/twopoint.hpp"

#include <cmath>

#include "glass/complexity.hpp"
#include "glass/covariance.hpp"
#include "glass/parallel.hpp"

namespace glass {

double h_overlap(const ModelParams& prm, const OverlapPoint& pt) {
    pt.validate();
    double r = pt.r, t = pt.t;
    double r2 = r * r, t2 = t * t;
    double a0 = (1.0 - r2) / (1.0 - pow_i(t, 2 * prm.q) * pow_i(r, 2 * prm.p - 2));
    double a1 = (1.0 - t2) / (1.0 - pow_i(t, 2 * prm.q - 2) * pow_i(r, 2 * prm.p));
    return 0.5 * prm.gamma * std::log(a0) + 0.5 * (1.0 - prm.gamma) * std::log(a1);
}

double b_func(int p, int q, const OverlapPoint& pt) {
    double r = pt.r, t = pt.t;
    double rp = pow_i(r, p), tq = pow_i(t, q);
    return (1.0 - rp * tq) * (1.0 - pow_i(r, 2 * p - 2) * pow_i(t, 2 * q - 2)) +
           (p - 1.0) * (1.0 - r * r) * pow_i(r, p - 2) * tq * (1.0 - rp * pow_i(t, q - 2)) +
           (q - 1.0) * (1.0 - t * t) * rp * pow_i(t, q - 2) * (1.0 - pow_i(r, p - 2) * tq);
}

double k_func(int p, int q, const OverlapPoint& pt) {
    if (pt.r == 0.0 && pt.t == 0.0) return 0.0;
    double num = pow_i(pt.t, q) * pow_i(pt.r, p) *
                 (1.0 - pow_i(pt.r, p - 2) * pow_i(pt.t, q)) *
                 (1.0 - pow_i(pt.r, p) * pow_i(pt.t, q - 2));
    return num / b_func(p, q, pt);
}

double m_func(int p, int q, const OverlapPoint& pt) {
    double r2 = pt.r * pt.r, t2 = pt.t * pt.t;
    return (p - 1.0) * (1.0 - r2) * t2 + (q - 1.0) * (1.0 - t2) * r2;
}

double kbar_func(int p, int q, const OverlapPoint& pt) {
    if (pt.r == 0.0 && pt.t == 0.0) return 0.0;
    double num = pt.t * pt.t * pt.r * pt.r * (1.0 - pow_i(pt.r, p - 1) * pow_i(pt.t, q - 1));
    return num / (2.0 * m_func(p, q, pt));
}

double q_func(const ModelParams& prm, const OverlapPoint& pt, double E) {
    return h_overlap(prm, pt) + E * E * k_func(prm.p, prm.q, pt);
}

double qbar_func(const ModelParams& prm, const OverlapPoint& pt, double E) {
    return h_overlap(prm, pt) + E * E * kbar_func(prm.p, prm.q, pt);
}

double qbar_boundary(int p, double r) {
    double r2 = r * r;
    return 0.5 * std::log((1.0 - r2) / (1.0 - pow_i(r, 2 * p - 2))) +
           std::log(p - 1.0) / (p - 1.0) * (1.0 - pow_i(r, p - 1)) * r2 / (1.0 - r2);
}

double qhat(int p, double r) {
    double r2 = r * r;
    return -0.5 * std::log(1.0 + r2) + std::log(p - 1.0) / (p - 1.0) * r2 / (1.0 - r2);
}

double qhat10_coefficient() {
    double s = 0.61 * 0.61;
    return -0.5 * std::log(1.0 + s) / s + std::log(9.0) / 9.0 / (1.0 - s);
}

double psi(const ModelParams& prm, const SpectralMeasure& measure, const OverlapPoint& pt,
           double E1, double E2, const Eigen::Matrix2d& sigma_E) {
    Eigen::LLT<Eigen::Matrix2d> llt(sigma_E);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("psi: sigma_E is not positive definite");
    Eigen::Vector2d e(E1, E2);
    double quad = e.dot(llt.solve(e));
    return h_overlap(prm, pt) - 0.5 * quad + log_potential(measure, E1) +
           log_potential(measure, E2);
}

double sigma2(const ModelParams& prm, const SpectralMeasure& measure, const OverlapPoint& pt,
              double E1, double E2, const Eigen::Matrix2d& sigma_E) {
    return 2.0 * constant_C(prm) + psi(prm, measure, pt, E1, E2, sigma_E);
}

TwoPointSurface sup_sigma2(const ModelParams& prm, const SpectralMeasure& measure, double E,
                           int grid_res, int workers) {
    prm.validate();
    if (grid_res < 3) throw std::invalid_argument("sup_sigma2: grid_res too small");
    if (grid_res % 2 == 0) ++grid_res;  // keep the origin on the grid

    const double delta = 1e-3;
    TwoPointSurface surf;
    surf.params = prm;
    surf.e1 = surf.e2 = E;
    // Symmetric grid with the origin exactly on it.
    int half = (grid_res - 1) / 2;
    double step = (1.0 - delta) / half;
    surf.r_grid.resize(grid_res);
    for (int i = 0; i < grid_res; ++i) surf.r_grid[i] = (i - half) * step;
    surf.t_grid = surf.r_grid;
    surf.values.resize(grid_res, grid_res);

    // Psi(r,t,E,E) = [h - E^2 (1,1) Sigma_E^{-1} (1,1)^t / 2] + 2 Omega(E); the
    // bracket is what varies over the grid. gap = sup(bracket) + E^2, since
    // 2 Theta(E) = -E^2 + 2 Omega(E) shares the Omega term.
    Eigen::MatrixXd bracket(grid_res, grid_res);
    parallel_for(static_cast<std::size_t>(grid_res), resolve_workers(workers),
                 [&](std::size_t i) {
                     Eigen::Vector2d ones = Eigen::Vector2d::Ones();
                     for (int j = 0; j < grid_res; ++j) {
                         OverlapPoint pt{surf.r_grid[static_cast<Eigen::Index>(i)],
                                         surf.t_grid[j]};
                         Eigen::Matrix2d se = assemble_sigma_E(prm.p, prm.q, pt.r, pt.t);
                         double quad = ones.dot(se.llt().solve(ones));
                         bracket(static_cast<Eigen::Index>(i), j) =
                             h_overlap(prm, pt) - 0.5 * E * E * quad;
                     }
                 });

    double omegaE = log_potential(measure, E);
    Eigen::Index bi = 0, bj = 0;
    double best = bracket.maxCoeff(&bi, &bj);
    surf.values = bracket.array() + 2.0 * omegaE + 2.0 * constant_C(prm);
    surf.argmax = OverlapPoint{surf.r_grid[bi], surf.t_grid[bj]};
    surf.supremum = surf.values(bi, bj);
    surf.gap = best + E * E;  // supremum - 2 Sigma(E), Omega terms cancelled
    return surf;
}

InequalityChainReport verify_inequality_chain(int p, int q, int grid_res) {
    if (p < 2 || q < 2) throw std::invalid_argument("verify_inequality_chain: p,q >= 2");
    InequalityChainReport rep;
    rep.p = p;
    rep.q = q;
    const double delta = 1e-3;
    for (int i = 0; i < grid_res; ++i) {
        for (int j = 0; j < grid_res; ++j) {
            double r = delta + (1.0 - 2.0 * delta) * i / (grid_res - 1.0);
            double t = delta + (1.0 - 2.0 * delta) * j / (grid_res - 1.0);
            OverlapPoint pt{r, t};
            double m = m_func(p, q, pt);

            double lhs1 = 1.0 - pow_i(r, 2 * p - 2) * pow_i(t, 2 * q - 2);
            double rhs1 = pow_i(r, p - 2) * pow_i(t, q - 2) * m;
            rep.first_max_violation = std::max(rep.first_max_violation, rhs1 - lhs1);

            double lhs2 = (1.0 - pow_i(r, p - 2) * pow_i(t, q)) +
                          (1.0 - pow_i(r, p) * pow_i(t, q));
            double rhs2 = 2.0 * (1.0 - pow_i(r, p - 2) * pow_i(t, q)) *
                          (1.0 - pow_i(r, p) * pow_i(t, q - 2)) /
                          (1.0 - pow_i(r, p - 1) * pow_i(t, q - 1));
            rep.second_max_violation = std::max(rep.second_max_violation, rhs2 - lhs2);

            double lhs3 = b_func(p, q, pt);
            double rhs3 = 2.0 * pow_i(r, p - 2) * pow_i(t, q - 2) * m *
                          (1.0 - pow_i(r, p - 2) * pow_i(t, q)) *
                          (1.0 - pow_i(r, p) * pow_i(t, q - 2)) /
                          (1.0 - pow_i(r, p - 1) * pow_i(t, q - 1));
            rep.third_max_violation = std::max(rep.third_max_violation, rhs3 - lhs3);

            rep.jbar22_max = std::max(rep.jbar22_max, -r * r - t * t + 2.0 * r * r * t * t);

            // lbar_{p,q} at p = q = 1 against its closed form 2 (r - t)^2.
            double lbar11 = (t - r) * (t - r) + r * r * (1.0 - t * t) + t * t +
                            r * r * t * t - 2.0 * r * t;
            rep.lbar11_max_abs_dev =
                std::max(rep.lbar11_max_abs_dev, std::abs(lbar11 - 2.0 * (r - t) * (r - t)));
        }
    }
    return rep;
}

double finite_n_h(const ModelParams& prm, int N1, int N2, const OverlapPoint& pt) {
    if (N1 < 3 || N2 < 3) throw std::invalid_argument("finite_n_h: require N1, N2 >= 3");
    pt.validate();
    double r = pt.r, t = pt.t;
    double a0 = (1.0 - r * r) / (1.0 - pow_i(t, 2 * prm.q) * pow_i(r, 2 * prm.p - 2));
    double a1 = (1.0 - t * t) / (1.0 - pow_i(r, 2 * prm.p) * pow_i(t, 2 * prm.q - 2));
    return 0.5 * (N1 - 2.0) * std::log(a0) + 0.5 * (N2 - 2.0) * std::log(a1);
}

}  // namespace glass
