#include "glass/covariance.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace glass {

double rho_kernel(double r, const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
    double xs = std::sqrt(1.0 - x.squaredNorm());
    double ys = std::sqrt(1.0 - y.squaredNorm());
    double rs = std::sqrt(std::max(0.0, 1.0 - r * r));
    return x[1] * y[1] + x[2] * y[2] + r * x[0] * y[0] + rs * x[0] * ys - rs * y[0] * xs +
           r * xs * ys;
}

double field_covariance(int p, int q, double r, double t, const SphereKernelPoint& a,
                        const SphereKernelPoint& b) {
    if (a.x.norm() >= 1.0 || a.y.norm() >= 1.0 || b.x.norm() >= 1.0 || b.y.norm() >= 1.0)
        throw std::invalid_argument("field_covariance: chart coordinates must have norm < 1");
    return pow_i(rho_kernel(r, a.x, b.x), p) * pow_i(rho_kernel(t, a.y, b.y), q);
}

namespace {

double fd_recurse(int p, int q, double r, double t, const std::vector<DerivDir>& dirs,
                  std::size_t level, SphereKernelPoint& a, SphereKernelPoint& b, double h) {
    if (level == dirs.size()) return field_covariance(p, q, r, t, a, b);
    const DerivDir& d = dirs[level];
    SphereKernelPoint& pt = d.arg == 0 ? a : b;
    Eigen::Vector3d& block = d.sphere == 0 ? pt.x : pt.y;
    double& coord = block[d.index - 1];
    double saved = coord;
    coord = saved + h;
    double up = fd_recurse(p, q, r, t, dirs, level + 1, a, b, h);
    coord = saved - h;
    double dn = fd_recurse(p, q, r, t, dirs, level + 1, a, b, h);
    coord = saved;
    return (up - dn) / (2.0 * h);
}

}  // namespace

double fd_covariance_oracle(int p, int q, double r, double t,
                            const std::vector<DerivDir>& dirs, double step) {
    for (const auto& d : dirs)
        if (d.index < 1 || d.index > 3 || d.arg < 0 || d.arg > 1 || d.sphere < 0 ||
            d.sphere > 1)
            throw std::invalid_argument("fd_covariance_oracle: bad derivative direction");
    SphereKernelPoint a, b;
    double d1 = fd_recurse(p, q, r, t, dirs, 0, a, b, step);
    double d2 = fd_recurse(p, q, r, t, dirs, 0, a, b, 0.5 * step);
    double d3 = fd_recurse(p, q, r, t, dirs, 0, a, b, 0.25 * step);
    // Two Richardson levels: kills h^2 and h^4, leaving O(h^6) truncation
    // with roundoff ~ eps / step^order well under the 1e-6 target.
    double r1 = (4.0 * d2 - d1) / 3.0;
    double r2 = (4.0 * d3 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

namespace {

struct SplitDirs {
    std::vector<DerivDir> at_n;    // derivatives on h(n)
    std::vector<DerivDir> at_nrt;  // derivatives on h(n(r,t))
};

SplitDirs split(const std::vector<DerivDir>& dirs) {
    SplitDirs s;
    for (const auto& d : dirs) (d.arg == 0 ? s.at_n : s.at_nrt).push_back(d);
    return s;
}

inline bool piv(const DerivDir& d) { return d.index == 1; }

// Gradient (at n) x value rows; value x gradient is the negative.
double grad_value(int p, int q, double r, double t, const DerivDir& g) {
    if (!piv(g)) return 0.0;
    double rs = std::sqrt(1.0 - r * r), ts = std::sqrt(1.0 - t * t);
    if (g.sphere == 0) return p * pow_i(r, p - 1) * rs * pow_i(t, q);
    return q * pow_i(t, q - 1) * ts * pow_i(r, p);
}

// Gradient x gradient rows (first at n, second at n(r,t)).
double grad_grad(int p, int q, double r, double t, const DerivDir& a, const DerivDir& b) {
    double rs = std::sqrt(1.0 - r * r), ts = std::sqrt(1.0 - t * t);
    if (a.sphere == 0 && b.sphere == 0) {
        if (a.index != b.index) return 0.0;
        if (!piv(a)) return pow_i(t, q) * p * pow_i(r, p - 1);
        return pow_i(t, q) * p * pow_i(r, p - 2) * (p * r * r - (p - 1.0));
    }
    if (a.sphere == 1 && b.sphere == 1) {
        if (a.index != b.index) return 0.0;
        if (!piv(a)) return pow_i(r, p) * q * pow_i(t, q - 1);
        return pow_i(r, p) * q * pow_i(t, q - 2) * (q * t * t - (q - 1.0));
    }
    if (!piv(a) || !piv(b)) return 0.0;
    return -p * q * pow_i(t, q - 1) * pow_i(r, p - 1) * rs * ts;
}

// Hessian x value rows; same value in both orders.
double hess_value(int p, int q, double r, double t, const DerivDir& a, const DerivDir& b) {
    double rs2 = 1.0 - r * r, ts2 = 1.0 - t * t;
    if (a.sphere == 0 && b.sphere == 0) {
        if (a.index != b.index) return 0.0;
        double v = -p * pow_i(r, p);
        if (piv(a)) v += p * (p - 1.0) * pow_i(r, p - 2) * rs2;
        return pow_i(t, q) * v;
    }
    if (a.sphere == 1 && b.sphere == 1) {
        if (a.index != b.index) return 0.0;
        double v = -q * pow_i(t, q);
        if (piv(a)) v += q * (q - 1.0) * pow_i(t, q - 2) * ts2;
        return pow_i(r, p) * v;
    }
    if (!piv(a) || !piv(b)) return 0.0;
    return p * q * pow_i(r, p - 1) * pow_i(t, q - 1) * std::sqrt(rs2) * std::sqrt(ts2);
}

// Hessian (at n) x gradient (at n(r,t)) rows; gradient x Hessian is the
// negative.
double hess_grad(int p, int q, double r, double t, const DerivDir& h1, const DerivDir& h2,
                 const DerivDir& g) {
    double rs = std::sqrt(1.0 - r * r), ts = std::sqrt(1.0 - t * t);
    double rs2 = 1.0 - r * r, ts2 = 1.0 - t * t;

    if (h1.sphere == 0 && h2.sphere == 0) {
        int i = h1.index, j = h2.index, k = g.index;
        if (g.sphere == 0) {
            double acc = 0.0;
            if (k != 1 && ((i == 1 && j == k) || (j == 1 && i == k)))
                acc += p * (p - 1.0) * rs * pow_i(r, p - 2);
            if (k == 1) {
                if (i == j) acc += p * p * pow_i(r, p - 1) * rs;
                if (i == 1 && j == 1) {
                    double tail = 2.0 * pow_i(r, p - 1);
                    if (p > 2) tail -= (p - 2.0) * pow_i(r, p - 3) * rs2;
                    acc += p * (p - 1.0) * rs * tail;
                }
            }
            return pow_i(t, q) * acc;
        }
        // second-sphere gradient
        if (g.index != 1) return 0.0;
        double v = -p * pow_i(r, p);
        if (i == 1 && j == 1) v += p * (p - 1.0) * pow_i(r, p - 2) * rs2;
        else if (i != j) return 0.0;
        return -q * ts * pow_i(t, q - 1) * v;
    }

    if (h1.sphere == 1 && h2.sphere == 1) {
        int i = h1.index, j = h2.index, k = g.index;
        if (g.sphere == 1) {
            double acc = 0.0;
            if (k != 1 && ((i == 1 && j == k) || (j == 1 && i == k)))
                acc += q * (q - 1.0) * ts * pow_i(t, q - 2);
            if (k == 1) {
                if (i == j) acc += q * q * pow_i(t, q - 1) * ts;
                if (i == 1 && j == 1) {
                    double tail = 2.0 * pow_i(t, q - 1);
                    if (q > 2) tail -= (q - 2.0) * pow_i(t, q - 3) * ts2;
                    acc += q * (q - 1.0) * ts * tail;
                }
            }
            return pow_i(r, p) * acc;
        }
        if (g.index != 1) return 0.0;
        double v = -q * pow_i(t, q);
        if (i == 1 && j == 1) v += q * (q - 1.0) * pow_i(t, q - 2) * ts2;
        else if (i != j) return 0.0;
        return -p * rs * pow_i(r, p - 1) * v;
    }

    // Mixed Hessian: one direction per sphere.
    const DerivDir& d0 = h1.sphere == 0 ? h1 : h2;  // first-sphere direction
    const DerivDir& d1 = h1.sphere == 0 ? h2 : h1;  // second-sphere direction
    if (g.sphere == 0) {
        if (!piv(d1)) return 0.0;
        int a = d0.index, k = g.index;
        double inner = 0.0;
        if (a == k && a != 1) inner = p * pow_i(r, p - 1);
        if (a == 1 && k == 1) inner = p * pow_i(r, p - 2) * (p * r * r - (p - 1.0));
        return q * pow_i(t, q - 1) * ts * inner;
    }
    if (!piv(d0)) return 0.0;
    int b = d1.index, k = g.index;
    double inner = 0.0;
    if (b == k && b != 1) inner = q * pow_i(t, q - 1);
    if (b == 1 && k == 1) inner = q * pow_i(t, q - 2) * (q * t * t - (q - 1.0));
    return p * pow_i(r, p - 1) * rs * inner;
}

}  // namespace

double table_entry(int p, int q, double r, double t, const std::vector<DerivDir>& dirs) {
    SplitDirs s = split(dirs);
    std::size_t na = s.at_n.size(), nb = s.at_nrt.size();
    if (na > 2 || nb > 2 || na + nb > 3)
        throw std::invalid_argument("table_entry: order not covered by the table");

    if (na == 0 && nb == 0) return pow_i(r, p) * pow_i(t, q);
    if (na == 1 && nb == 0) return grad_value(p, q, r, t, s.at_n[0]);
    if (na == 0 && nb == 1) return -grad_value(p, q, r, t, s.at_nrt[0]);
    if (na == 1 && nb == 1) return grad_grad(p, q, r, t, s.at_n[0], s.at_nrt[0]);
    if (na == 2 && nb == 0) return hess_value(p, q, r, t, s.at_n[0], s.at_n[1]);
    if (na == 0 && nb == 2) return hess_value(p, q, r, t, s.at_nrt[0], s.at_nrt[1]);
    if (na == 2 && nb == 1) return hess_grad(p, q, r, t, s.at_n[0], s.at_n[1], s.at_nrt[0]);
    // na == 1, nb == 2
    return -hess_grad(p, q, r, t, s.at_nrt[0], s.at_nrt[1], s.at_n[0]);
}

std::vector<TableEntry> derivative_covariance_table(int p, int q, double r, double t) {
    std::vector<TableEntry> rows;
    auto add = [&](std::string name, std::vector<DerivDir> dirs) {
        double v = table_entry(p, q, r, t, dirs);
        rows.push_back(TableEntry{std::move(name), std::move(dirs), v});
    };
    add("value.value", {});
    add("grad1_piv.value", {{0, 0, 1}});
    add("grad2_piv.value", {{0, 1, 1}});
    add("value.grad1_piv", {{1, 0, 1}});
    add("value.grad2_piv", {{1, 1, 1}});
    add("grad1_piv.grad1_piv", {{0, 0, 1}, {1, 0, 1}});
    add("grad1_off.grad1_off", {{0, 0, 2}, {1, 0, 2}});
    add("grad2_piv.grad2_piv", {{0, 1, 1}, {1, 1, 1}});
    add("grad2_off.grad2_off", {{0, 1, 2}, {1, 1, 2}});
    add("grad1_piv.grad2_piv", {{0, 0, 1}, {1, 1, 1}});
    add("grad2_piv.grad1_piv", {{0, 1, 1}, {1, 0, 1}});
    add("hess11_pivpiv.value", {{0, 0, 1}, {0, 0, 1}});
    add("hess11_offoff.value", {{0, 0, 2}, {0, 0, 2}});
    add("hess22_pivpiv.value", {{0, 1, 1}, {0, 1, 1}});
    add("hess22_offoff.value", {{0, 1, 2}, {0, 1, 2}});
    add("hess12_pivpiv.value", {{0, 0, 1}, {0, 1, 1}});
    add("value.hess11_pivpiv", {{1, 0, 1}, {1, 0, 1}});
    add("hess11_pivpiv.grad1_piv", {{0, 0, 1}, {0, 0, 1}, {1, 0, 1}});
    add("hess11_pivoff.grad1_off", {{0, 0, 1}, {0, 0, 2}, {1, 0, 2}});
    add("hess11_pivpiv.grad2_piv", {{0, 0, 1}, {0, 0, 1}, {1, 1, 1}});
    add("hess22_pivpiv.grad2_piv", {{0, 1, 1}, {0, 1, 1}, {1, 1, 1}});
    add("hess22_pivoff.grad2_off", {{0, 1, 1}, {0, 1, 2}, {1, 1, 2}});
    add("hess22_pivpiv.grad1_piv", {{0, 1, 1}, {0, 1, 1}, {1, 0, 1}});
    add("hess12_pivpiv.grad1_piv", {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}});
    add("hess12_offpiv.grad1_off", {{0, 0, 2}, {0, 1, 1}, {1, 0, 2}});
    add("hess12_pivpiv.grad2_piv", {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}});
    add("hess12_pivoff.grad2_off", {{0, 0, 1}, {0, 1, 2}, {1, 1, 2}});
    add("grad1_piv.hess11_pivpiv", {{0, 0, 1}, {1, 0, 1}, {1, 0, 1}});
    add("grad2_piv.hess22_pivpiv", {{0, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    return rows;
}

Eigen::Matrix4d assemble_sigma_L(int p, int q, double r, double t) {
    double rs = std::sqrt(1.0 - r * r), ts = std::sqrt(1.0 - t * t);
    double a = p * pow_i(r, p - 2) * pow_i(t, q) * (p * r * r - (p - 1.0));
    double b = q * pow_i(t, q - 2) * pow_i(r, p) * (q * t * t - (q - 1.0));
    double c = -p * q * pow_i(r, p - 1) * pow_i(t, q - 1) * rs * ts;
    Eigen::Matrix4d L;
    L << p, 0, a, c,
         0, q, c, b,
         a, c, p, 0,
         c, b, 0, q;
    return L;
}

double det_sigma_L_closed(int p, int q, double r, double t) {
    double rs2 = 1.0 - r * r, ts2 = 1.0 - t * t;
    double r2 = r * r, t2 = t * t;
    double b2 = p * rs2 + q * ts2 - 1.0;
    double b1 = (p - 1.0) * (p - 1.0) * t2 * t2 + (q - 1.0) * (q - 1.0) * r2 * r2 +
                r2 * t2 * (2.0 * p * q * rs2 * ts2 + 2.0 * q * r2 + 2.0 * p * t2 +
                           p * p * (r2 - 2.0) * t2 + q * q * (t2 - 2.0) * r2);
    return static_cast<double>(p) * p * q * q *
           (1.0 - pow_i(r, 2 * p - 4) * pow_i(t, 2 * q - 4) * b1 +
            pow_i(r, 4 * p - 4) * pow_i(t, 4 * q - 4) * b2 * b2);
}

double f_L(int p, int q, double r, double t) {
    constexpr double two_pi_sq = 39.478417604357434475337963999505;  // (2 pi)^2
    return 1.0 / (two_pi_sq * std::sqrt(det_sigma_L_closed(p, q, r, t)));
}

namespace {

Eigen::Matrix<double, 2, 4> cross_block_values(int p, int q, double r, double t) {
    double rs = std::sqrt(1.0 - r * r), ts = std::sqrt(1.0 - t * t);
    double g1 = p * pow_i(r, p - 1) * rs * pow_i(t, q);
    double g2 = q * pow_i(t, q - 1) * ts * pow_i(r, p);
    Eigen::Matrix<double, 2, 4> cross;
    cross << 0, 0, -g1, -g2,
             g1, g2, 0, 0;
    return cross;
}

}  // namespace

Eigen::Matrix2d assemble_sigma_E(int p, int q, double r, double t) {
    if (!(std::abs(r) < 1.0) || !(std::abs(t) < 1.0))
        throw std::invalid_argument("assemble_sigma_E: require |r| < 1 and |t| < 1");
    // Sigma_L is block-centrosymmetric [[A, B], [B, A]] with A = diag(p, q),
    // so (E_1 +- ^t) coordinates split it into A + B and A - B. With the
    // cross block [[0, -g], [g, 0]] the Schur complement reduces to the two
    // scalars alpha = g^t (A+B)^{-1} g and beta = g^t (A-B)^{-1} g, which is
    // far better conditioned near |r|, |t| -> 1 than a 4x4 solve.
    double rs = std::sqrt(1.0 - r * r), ts = std::sqrt(1.0 - t * t);
    double a = p * pow_i(r, p - 2) * pow_i(t, q) * (p * r * r - (p - 1.0));
    double b = q * pow_i(t, q - 2) * pow_i(r, p) * (q * t * t - (q - 1.0));
    double c = -p * q * pow_i(r, p - 1) * pow_i(t, q - 1) * rs * ts;
    double g1 = p * pow_i(r, p - 1) * rs * pow_i(t, q);
    double g2 = q * pow_i(t, q - 1) * ts * pow_i(r, p);
    auto quad = [&](double sgn) {
        double d00 = p + sgn * a, d11 = q + sgn * b, d01 = sgn * c;
        double det = d00 * d11 - d01 * d01;
        if (!(det > 0.0) || !(d00 > 0.0))
            throw std::runtime_error("assemble_sigma_E: Sigma_L numerically singular");
        return (g1 * g1 * d11 - 2.0 * g1 * g2 * d01 + g2 * g2 * d00) / det;
    };
    double alpha = quad(+1.0), beta = quad(-1.0);
    double v = pow_i(r, p) * pow_i(t, q);
    Eigen::Matrix2d se;
    se << 1.0 - 0.5 * (alpha + beta), v + 0.5 * (alpha - beta),
          v + 0.5 * (alpha - beta), 1.0 - 0.5 * (alpha + beta);
    return se;
}

Eigen::Matrix2d corner_hessian_display(int p, int q) {
    double s = 8.0 * p * p * q * q;
    double off = -3.0 * (p - 1.0) * (q - 1.0) - 2.0;
    Eigen::Matrix2d H;
    H << s * q * (3.0 * p - 2.0), s * off,
         s * off, s * p * (3.0 * q - 2.0);
    return H;
}

CornerVariance conditional_corner_variance(int p, int q, double r, double t) {
    if (!(std::abs(r) < 1.0) || !(std::abs(t) < 1.0))
        throw std::invalid_argument("conditional_corner_variance: require |r|,|t| < 1");
    double rs = std::sqrt(1.0 - r * r), ts = std::sqrt(1.0 - t * t);

    // Same-point Hessian second moments are not displayed in the table; take
    // them from the oracle at chart coincidence (r = t = 1).
    std::vector<DerivDir> h11h11 = {{0, 0, 1}, {0, 0, 1}, {1, 0, 1}, {1, 0, 1}};
    std::vector<DerivDir> h12h12 = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
    std::vector<DerivDir> h11h12 = {{0, 0, 1}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}};
    double v11 = fd_covariance_oracle(p, q, 1.0, 1.0, h11h11);
    double v12 = fd_covariance_oracle(p, q, 1.0, 1.0, h12h12);
    double c12 = fd_covariance_oracle(p, q, 1.0, 1.0, h11h12);
    double var_y = rs * rs * v11 + ts * ts * v12 + 2.0 * rs * ts * c12;

    // Covariances of (E_1E_1 h(n), E_1E^1 h(n)) with the four pivot gradients;
    // the same-point ones vanish.
    auto row = [&](const std::vector<DerivDir>& dirs) { return table_entry(p, q, r, t, dirs); };
    Eigen::Vector4d w_h11(0.0, 0.0,
                          row({{0, 0, 1}, {0, 0, 1}, {1, 0, 1}}),
                          row({{0, 0, 1}, {0, 0, 1}, {1, 1, 1}}));
    Eigen::Vector4d w_h12(0.0, 0.0,
                          row({{0, 0, 1}, {0, 1, 1}, {1, 0, 1}}),
                          row({{0, 0, 1}, {0, 1, 1}, {1, 1, 1}}));
    Eigen::Vector4d w = rs * w_h11 + ts * w_h12;

    Eigen::Matrix4d L = assemble_sigma_L(p, q, r, t);
    Eigen::LDLT<Eigen::Matrix4d> ldlt(L);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::runtime_error("conditional_corner_variance: Sigma_L singular");
    CornerVariance out;
    out.variance = var_y - w.dot(ldlt.solve(w));
    double denom = 2.0 - r * r - t * t;
    out.ratio = out.variance / (denom * denom);
    return out;
}

CovarianceBundle make_covariance_bundle(int p, int q, double r, double t) {
    CovarianceBundle b;
    b.p = p;
    b.q = q;
    b.pt = OverlapPoint{r, t};
    b.sigma_L = assemble_sigma_L(p, q, r, t);
    b.sigma_E = assemble_sigma_E(p, q, r, t);
    double v = pow_i(r, p) * pow_i(t, q);
    b.value_block << 1.0, v, v, 1.0;
    b.cross_block = cross_block_values(p, q, r, t);
    b.det_closed = det_sigma_L_closed(p, q, r, t);
    b.f_L_value = f_L(p, q, r, t);
    return b;
}

}  // namespace glass
