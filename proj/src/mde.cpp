#include "glass/mde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "glass/parallel.hpp"

namespace glass {

namespace {

struct Coeffs {
    // Self-energy weights: Sigma_0 = c00 m0 + c01 m1, Sigma_1 = c10 m0 + c11 m1.
    double c00, c01, c10, c11;
    explicit Coeffs(const ModelParams& prm)
        : c00(prm.gamma * (prm.p - 1) / prm.p),
          c01(1.0 - prm.gamma),
          c10(prm.gamma),
          c11((1.0 - prm.gamma) * (prm.q - 1) / prm.q) {}
};

inline void fixed_point_step(const Coeffs& c, Complex z, Complex& m0, Complex& m1,
                             double damping) {
    Complex f0 = -1.0 / (z + c.c00 * m0 + c.c01 * m1);
    Complex f1 = -1.0 / (z + c.c10 * m0 + c.c11 * m1);
    m0 = (1.0 - damping) * m0 + damping * f0;
    m1 = (1.0 - damping) * m1 + damping * f1;
}

// Lagrange weights for extrapolating a polynomial through the nodes to 0.
std::array<double, 3> extrapolation_weights(double e0, double e1, double e2) {
    return {e1 * e2 / ((e0 - e1) * (e0 - e2)),
            e0 * e2 / ((e1 - e0) * (e1 - e2)),
            e0 * e1 / ((e2 - e0) * (e2 - e1))};
}

}  // namespace

double mde_residual(const ModelParams& prm, Complex z, Complex m0, Complex m1) {
    Coeffs c(prm);
    Complex r0 = 1.0 + (z + c.c00 * m0 + c.c01 * m1) * m0;
    Complex r1 = 1.0 + (z + c.c10 * m0 + c.c11 * m1) * m1;
    return std::max(std::abs(r0), std::abs(r1));
}

StieltjesPair solve_mde_point(const ModelParams& prm, Complex z, const MdeOptions& opts,
                              std::optional<StieltjesPair> warm) {
    prm.validate();
    if (!(z.imag() > 0.0))
        throw std::invalid_argument("solve_mde_point: require Im z > 0");

    Coeffs c(prm);
    Complex init = -1.0 / z;
    Complex m0 = init, m1 = init;
    if (warm && warm->m0.imag() > 0.0 && warm->m1.imag() > 0.0) {
        m0 = warm->m0;
        m1 = warm->m1;
    }

    // Two attempts: the requested damping, then a cautious restart from -1/z.
    // The restart recovers the Herglotz branch if the first pass strayed.
    double residual = 0.0;
    int total_iter = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        double damping = attempt == 0 ? opts.damping : 0.25 * opts.damping;
        if (attempt == 1) m0 = m1 = init;
        for (int it = 0; it < opts.max_iter; ++it) {
            fixed_point_step(c, z, m0, m1, damping);
            ++total_iter;
            if ((it & 7) == 7 || it < 8) {
                residual = mde_residual(prm, z, m0, m1);
                if (residual <= opts.tol) break;
            }
        }
        residual = mde_residual(prm, z, m0, m1);
        if (residual <= opts.tol && m0.imag() > 0.0 && m1.imag() > 0.0)
            return StieltjesPair{z, m0, m1, residual, total_iter};
    }
    std::ostringstream msg;
    msg << "solve_mde_point: no Herglotz solution to tol " << opts.tol << " at z = ("
        << z.real() << ", " << z.imag() << "), last residual " << residual;
    throw ConvergenceError(msg.str(), residual, total_iter);
}

std::vector<double> DensityOptions::default_eta_schedule() {
    return {8e-4, 4e-4, 2e-4, 1e-4, 5e-5, 2.5e-5};
}

double covering_radius(const ModelParams& prm) {
    return 2.0 * std::sqrt(prm.gamma * (prm.p - 1) / prm.p +
                           (1.0 - prm.gamma) * (prm.q - 1) / prm.q + 1.0);
}

Eigen::ArrayXd default_grid(const ModelParams& prm, int n) {
    double half = 1.2 * covering_radius(prm);
    return Eigen::ArrayXd::LinSpaced(n, -half, half);
}

namespace {

// Im m0, Im m1 over the grid for each eta in the schedule.
struct SweepResult {
    std::vector<Eigen::ArrayXd> im0;  // [eta][x]
    std::vector<Eigen::ArrayXd> im1;
};

SweepResult sweep_grid(const ModelParams& prm, const Eigen::ArrayXd& x,
                       const DensityOptions& opts) {
    const auto& etas = opts.eta_schedule;
    SweepResult out;
    out.im0.assign(etas.size(), Eigen::ArrayXd(x.size()));
    out.im1.assign(etas.size(), Eigen::ArrayXd(x.size()));

    if (opts.sweep == MdeSweep::continuation) {
        std::optional<StieltjesPair> carry;
        for (std::size_t e = 0; e < etas.size(); ++e) {
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                Complex z(x[i], etas[e]);
                try {
                    StieltjesPair s = solve_mde_point(prm, z, opts.mde, carry);
                    carry = s;
                    out.im0[e][i] = s.m0.imag();
                    out.im1[e][i] = s.m1.imag();
                } catch (const ConvergenceError& err) {
                    std::ostringstream msg;
                    msg << "spectral_density: MDE failed at x = " << x[i]
                        << ", eta = " << etas[e] << ": " << err.what();
                    throw ConvergenceError(msg.str(), err.residual, err.iterations);
                }
            }
        }
    } else {
        int workers = resolve_workers(opts.workers);
        parallel_for(static_cast<std::size_t>(x.size()), workers, [&](std::size_t i) {
            std::optional<StieltjesPair> carry;  // continuation in eta only
            for (std::size_t e = 0; e < etas.size(); ++e) {
                Complex z(x[static_cast<Eigen::Index>(i)], etas[e]);
                try {
                    StieltjesPair s = solve_mde_point(prm, z, opts.mde, carry);
                    carry = s;
                    out.im0[e][static_cast<Eigen::Index>(i)] = s.m0.imag();
                    out.im1[e][static_cast<Eigen::Index>(i)] = s.m1.imag();
                } catch (const ConvergenceError& err) {
                    std::ostringstream msg;
                    msg << "spectral_density: MDE failed at x = "
                        << x[static_cast<Eigen::Index>(i)] << ", eta = " << etas[e] << ": "
                        << err.what();
                    throw ConvergenceError(msg.str(), err.residual, err.iterations);
                }
            }
        });
    }
    return out;
}

constexpr double kPi = 3.14159265358979323846;

Eigen::ArrayXd extrapolate_density(const std::vector<Eigen::ArrayXd>& im,
                                   const std::vector<double>& etas) {
    std::size_t n = etas.size();
    if (n == 1) return (im[0] / kPi).max(0.0);
    if (n == 2) {
        double w0 = -etas[1] / (etas[0] - etas[1]);
        double w1 = etas[0] / (etas[0] - etas[1]);
        return ((w0 * im[0] + w1 * im[1]) / kPi).max(0.0);
    }
    auto w = extrapolation_weights(etas[n - 3], etas[n - 2], etas[n - 1]);
    return ((w[0] * im[n - 3] + w[1] * im[n - 2] + w[2] * im[n - 1]) / kPi).max(0.0);
}

double detect_edge(const Eigen::ArrayXd& x, const Eigen::ArrayXd& density, double threshold) {
    // Smallest x0 >= 0 with density < threshold beyond it, on either side.
    double edge = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (density[i] >= threshold) edge = std::max(edge, std::abs(x[i]));
    return edge;
}

}  // namespace

double SpectralMeasure::trapezoid_mass() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
        m += 0.5 * (grid[i + 1] - grid[i]) * (density[i] + density[i + 1]);
    return m;
}

double SpectralMeasure::trapezoid_mass(int which) const {
    const Eigen::ArrayXd& d = which == 0 ? density0 : density1;
    double m = 0.0;
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
        m += 0.5 * (grid[i + 1] - grid[i]) * (d[i] + d[i + 1]);
    return m;
}

SpectralMeasure spectral_density(const ModelParams& prm, const Eigen::ArrayXd& x,
                                 const DensityOptions& opts) {
    prm.validate();
    if (opts.eta_schedule.empty())
        throw std::invalid_argument("spectral_density: empty eta schedule");
    for (std::size_t e = 1; e < opts.eta_schedule.size(); ++e)
        if (!(opts.eta_schedule[e] < opts.eta_schedule[e - 1]))
            throw std::invalid_argument("spectral_density: eta schedule must decrease");

    SweepResult sweep = sweep_grid(prm, x, opts);

    SpectralMeasure m;
    m.params = prm;
    m.grid = x;
    m.density0 = extrapolate_density(sweep.im0, opts.eta_schedule);
    m.density1 = extrapolate_density(sweep.im1, opts.eta_schedule);
    m.density = prm.gamma * m.density0 + (1.0 - prm.gamma) * m.density1;
    m.eta_used = opts.eta_schedule.back();
    m.edge = detect_edge(x, m.density, opts.edge_threshold);
    return m;
}

double support_edge(const ModelParams& prm, const SpectralMeasure& measure,
                    double density_threshold, const DensityOptions& opts) {
    if (!(density_threshold > 0.0))
        throw std::invalid_argument("support_edge: threshold must be positive");
    const Eigen::ArrayXd& x = measure.grid;
    const Eigen::ArrayXd& d = measure.density;

    // Bracket on the right half of the grid: last point at/above threshold.
    Eigen::Index last = -1;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] >= 0.0 && d[i] >= density_threshold) last = i;
    if (last < 0 || last + 1 >= x.size()) {
        throw std::runtime_error(
            "support_edge: grid too coarse to bracket the edge; refine the grid "
            "or enlarge its range");
    }

    // Extrapolated density at a single abscissa, using the three finest etas.
    const auto& etas = opts.eta_schedule;
    std::size_t n = etas.size();
    auto density_at = [&](double xx) {
        std::optional<StieltjesPair> carry;
        double vals[3] = {0, 0, 0};
        std::size_t lo = n >= 3 ? n - 3 : 0;
        for (std::size_t e = 0; e < n; ++e) {
            StieltjesPair s = solve_mde_point(prm, Complex(xx, etas[e]), opts.mde, carry);
            carry = s;
            if (e >= lo) {
                double im = prm.gamma * s.m0.imag() + (1.0 - prm.gamma) * s.m1.imag();
                vals[e - lo] = im / kPi;
            }
        }
        if (n < 3) return std::max(0.0, vals[n - 1]);
        auto w = extrapolation_weights(etas[n - 3], etas[n - 2], etas[n - 1]);
        return std::max(0.0, w[0] * vals[0] + w[1] * vals[1] + w[2] * vals[2]);
    };

    double lo = x[last], hi = x[last + 1];
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        (density_at(mid) >= density_threshold ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace glass
