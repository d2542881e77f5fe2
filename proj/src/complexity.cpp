#include "glass/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace glass {

double omega_sc(double E) {
    double a = std::abs(E);
    if (a < 2.0) return 0.25 * E * E - 0.5;
    double s = std::sqrt(E * E - 4.0);
    return 0.25 * E * E - 0.5 - (0.25 * a * s - std::log(0.5 * (a + s)));
}

double constant_C(const ModelParams& prm) {
    prm.validate();
    return 0.5 * (1.0 + prm.gamma * std::log(prm.p / prm.gamma) +
                  (1.0 - prm.gamma) * std::log(prm.q / (1.0 - prm.gamma)));
}

double threshold_eth(const ModelParams& prm) {
    prm.validate();
    return std::sqrt(2.0 * (prm.gamma * std::log(prm.p - 1.0) +
                            (1.0 - prm.gamma) * std::log(prm.q - 1.0)));
}

namespace {

// int log|x - E| dx over [a, b] in closed form; antiderivative u log|u| - u.
double log_cell_integral(double a, double b, double E) {
    auto G = [E](double x) {
        double u = x - E;
        return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u;
    };
    return G(b) - G(a);
}

double interp_density(const SpectralMeasure& m, double E) {
    const auto& x = m.grid;
    if (E <= x[0] || E >= x[x.size() - 1]) return 0.0;
    Eigen::Index hi = 1;
    while (x[hi] < E) ++hi;
    double w = (E - x[hi - 1]) / (x[hi] - x[hi - 1]);
    return (1.0 - w) * m.density[hi - 1] + w * m.density[hi];
}

}  // namespace

double log_potential(const SpectralMeasure& m, double E) {
    const auto& x = m.grid;
    const auto& rho = m.density;
    const Eigen::Index n = x.size();
    double mass = m.trapezoid_mass();

    double lo = x[0], hi = x[n - 1];
    if (E < lo || E > hi) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            double fa = rho[i] * std::log(std::abs(x[i] - E));
            double fb = rho[i + 1] * std::log(std::abs(x[i + 1] - E));
            acc += 0.5 * (x[i + 1] - x[i]) * (fa + fb);
        }
        return acc / mass;
    }

    // Inside the grid: subtract the local value so the integrand is bounded,
    // then add back rho(E) int log|x - E| dx in closed form.
    double rhoE = interp_density(m, E);
    auto f = [&](Eigen::Index i) {
        double u = x[i] - E;
        if (u == 0.0) return 0.0;
        return (rho[i] - rhoE) * std::log(std::abs(u));
    };
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        acc += 0.5 * (x[i + 1] - x[i]) * (f(i) + f(i + 1));
    acc += rhoE * log_cell_integral(lo, hi, E);
    return acc / mass;
}

double regularized_log_potential(const SpectralMeasure& m, double E, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("regularized_log_potential: require eps > 0");
    const auto& x = m.grid;
    const auto& rho = m.density;
    double mass = m.trapezoid_mass();
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        double ua = x[i] - E, ub = x[i + 1] - E;
        double fa = rho[i] * 0.5 * std::log(ua * ua + eps * eps);
        double fb = rho[i + 1] * 0.5 * std::log(ub * ub + eps * eps);
        acc += 0.5 * (x[i + 1] - x[i]) * (fa + fb);
    }
    return acc / mass;
}

double theta(const ModelParams& prm, const SpectralMeasure& m, double E) {
    (void)prm;
    return -0.5 * E * E + log_potential(m, E);
}

double sigma(const ModelParams& prm, const SpectralMeasure& m, double E) {
    return constant_C(prm) + theta(prm, m, E);
}

double sigma_upper_bound(const ModelParams& prm, double E) {
    double g = prm.gamma;
    return constant_C(prm) + g * omega_sc(E * std::sqrt(prm.p / ((prm.p - 1.0) * g))) +
           (1.0 - g) * omega_sc(E * std::sqrt(prm.q / ((prm.q - 1.0) * (1.0 - g)))) -
           0.5 * E * E;
}

namespace {

// w / (E / sqrt(w) - 2) written as w^{3/2} / (E - 2 sqrt(w)) so the w -> 0
// endpoint evaluates to 0 without forming an infinity.
double f_gamma_term(double w, double E) {
    double sw = std::sqrt(w);
    double denom = E - 2.0 * sw;
    if (!(denom > 0.0))
        throw std::invalid_argument("f_gamma: require E/sqrt(w) > 2 for both weights");
    return w * sw / denom;
}

}  // namespace

double f_gamma(double gamma, double E) {
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("f_gamma: require gamma in [0, 1]");
    return f_gamma_term(gamma, E) + f_gamma_term(1.0 - gamma, E);
}

double sigma_hat(double gamma, double E) {
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("sigma_hat: require gamma in [0, 1]");
    auto term = [E](double w) {
        if (w == 0.0) return 0.0;  // w Omega_sc(E sqrt(96/(95 w))) -> 0
        return w * omega_sc(E * std::sqrt(96.0 / (95.0 * w)));
    };
    return 0.5 * (1.0 + std::log(2.0)) + 0.25 * E * E + term(gamma) + term(1.0 - gamma) -
           0.5 * E * E;
}

double find_e0(const ModelParams& prm, const SpectralMeasure& m, double e_inf,
               const RootOptions& opts) {
    auto S = [&](double E) { return sigma(prm, m, E); };
    double a = e_inf + opts.scan_start_offset;
    double fa = S(a);
    if (!(fa > 0.0)) {
        std::ostringstream msg;
        msg << "find_e0: Sigma(" << a << ") = " << fa
            << " is not positive above e_inf; measure or parameter regime issue";
        throw std::runtime_error(msg.str());
    }
    double b = a, fb = fa;
    while (fb > 0.0) {
        b += opts.scan_step;
        if (b > opts.scan_limit) {
            std::ostringstream msg;
            msg << "find_e0: no sign change of Sigma found on [" << a << ", "
                << opts.scan_limit << "]";
            throw std::runtime_error(msg.str());
        }
        fb = S(b);
    }
    double lo = b - opts.scan_step, hi = b;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = S(mid);
        if (std::abs(fm) <= opts.sigma_tol) return mid;
        (fm > 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::pair<double, double>> sigma_sign_changes(const ModelParams& prm,
                                                          const SpectralMeasure& m,
                                                          double e_inf,
                                                          const RootOptions& opts) {
    std::vector<std::pair<double, double>> out;
    double a = e_inf + opts.scan_start_offset;
    double prev = sigma(prm, m, a);
    for (double E = a + opts.scan_step; E <= opts.scan_limit; E += opts.scan_step) {
        double cur = sigma(prm, m, E);
        if ((prev > 0.0) != (cur > 0.0)) out.emplace_back(E - opts.scan_step, E);
        prev = cur;
        if (cur < -10.0) break;  // Sigma ~ -E^2/2 from here on
    }
    return out;
}

ComplexityReport build_complexity_report(const ModelParams& prm, const SpectralMeasure& m,
                                         int grid_points) {
    ComplexityReport rep;
    rep.params = prm;
    rep.c_const = constant_C(prm);
    rep.e_th = threshold_eth(prm);
    rep.e_inf = support_edge(prm, m);
    rep.e_zero = find_e0(prm, m, rep.e_inf);
    rep.sign_changes = sigma_sign_changes(prm, m, rep.e_inf);

    double half = 1.25 * std::max(rep.e_zero, std::max(rep.e_th, rep.e_inf)) + 0.5;
    rep.e_grid = Eigen::ArrayXd::LinSpaced(grid_points, -half, half);
    rep.sigma.resize(grid_points);
    rep.omega.resize(grid_points);
    rep.upper_bound.resize(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        double E = rep.e_grid[i];
        rep.omega[i] = log_potential(m, E);
        rep.sigma[i] = rep.c_const - 0.5 * E * E + rep.omega[i];
        rep.upper_bound[i] = sigma_upper_bound(prm, E);
    }
    return rep;
}

}  // namespace glass
