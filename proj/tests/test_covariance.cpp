#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glass/covariance.hpp"
#include "glass/rng.hpp"
#include "glass/twopoint.hpp"

using namespace glass;

TEST_CASE("field covariance at the chart origins") {
    SphereKernelPoint o;
    CHECK(field_covariance(3, 4, 0.3, -0.5, o, o) ==
          doctest::Approx(pow_i(0.3, 3) * pow_i(-0.5, 4)).epsilon(1e-15));
    CHECK(field_covariance(5, 2, 1.0, 1.0, o, o) == 1.0);
}

TEST_CASE("field covariance is symmetric under joint rotation of i >= 2 coords") {
    // Swapping coordinates 2 <-> 3 in both arguments leaves rho unchanged.
    SphereKernelPoint a, b;
    a.x << 0.1, 0.2, -0.3;
    a.y << 0.0, 0.15, 0.25;
    b.x << -0.2, 0.05, 0.1;
    b.y << 0.3, -0.1, 0.2;
    double v1 = field_covariance(3, 4, 0.4, 0.6, a, b);
    std::swap(a.x[1], a.x[2]);
    std::swap(b.x[1], b.x[2]);
    std::swap(a.y[1], a.y[2]);
    std::swap(b.y[1], b.y[2]);
    double v2 = field_covariance(3, 4, 0.4, 0.6, a, b);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-15));
}

TEST_CASE("fd oracle reproduces zero-order and Hessian-value entries") {
    CHECK(std::abs(fd_covariance_oracle(3, 4, 0.3, -0.5, {}) -
                   pow_i(0.3, 3) * pow_i(-0.5, 4)) < 1e-10);
    // (1,1)-Hessian x value at i=j=1: t^q(-p r^p + p(p-1) r^{p-2} (1-r^2)).
    int p = 4, q = 3;
    double r = 0.45, t = 0.7;
    double expect =
        pow_i(t, q) * (-p * pow_i(r, p) + p * (p - 1.0) * pow_i(r, p - 2) * (1.0 - r * r));
    double fd = fd_covariance_oracle(p, q, r, t, {{0, 0, 1}, {0, 0, 1}});
    CHECK(std::abs(fd - expect) < 1e-7);
}

TEST_CASE("every displayed table row matches the fd oracle") {
    CounterRng rng(20240817, 0);
    for (int trial = 0; trial < 20; ++trial) {
        int p = 2 + static_cast<int>(rng.next_u64() % 6);
        int q = 2 + static_cast<int>(rng.next_u64() % 6);
        double r = 1.9 * rng.next_uniform() - 0.95;
        double t = 1.9 * rng.next_uniform() - 0.95;
        for (const TableEntry& row : derivative_covariance_table(p, q, r, t)) {
            double fd = fd_covariance_oracle(p, q, r, t, row.dirs);
            INFO("row ", row.name, " p=", p, " q=", q, " r=", r, " t=", t);
            CHECK(std::abs(fd - row.value) < 1e-6);
        }
    }
}

TEST_CASE("antisymmetry when the differentiated argument switches") {
    int p = 3, q = 5;
    double r = 0.4, t = -0.6;
    // Gradient-value rows.
    double gv = table_entry(p, q, r, t, {{0, 0, 1}});
    double vg = table_entry(p, q, r, t, {{1, 0, 1}});
    CHECK(gv == doctest::Approx(-vg).epsilon(1e-15));
    CHECK(std::abs(fd_covariance_oracle(p, q, r, t, {{0, 0, 1}}) -
                   (-fd_covariance_oracle(p, q, r, t, {{1, 0, 1}}))) < 1e-8);
    // Hessian-gradient rows.
    double hg = table_entry(p, q, r, t, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}});
    double gh = table_entry(p, q, r, t, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}});
    double fd_hg = fd_covariance_oracle(p, q, r, t, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}});
    double fd_gh = fd_covariance_oracle(p, q, r, t, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}});
    CHECK(std::abs(hg - fd_hg) < 1e-7);
    CHECK(std::abs(gh - fd_gh) < 1e-7);
}

TEST_CASE("independence structure: non-pivot cross entries vanish identically") {
    for (auto [p, q] : {std::pair{3, 4}, {2, 5}}) {
        for (double r : {0.3, -0.8})
            for (double t : {0.5, -0.2}) {
                // value x gradient with i != 1.
                CHECK(table_entry(p, q, r, t, {{1, 0, 2}}) == 0.0);
                CHECK(table_entry(p, q, r, t, {{1, 1, 3}}) == 0.0);
                // gradient x gradient, mismatched indices.
                CHECK(table_entry(p, q, r, t, {{0, 0, 2}, {1, 0, 3}}) == 0.0);
                // mixed-sphere gradients off the pivot.
                CHECK(table_entry(p, q, r, t, {{0, 0, 2}, {1, 1, 2}}) == 0.0);
                // Hessian x value with i != j.
                CHECK(table_entry(p, q, r, t, {{0, 0, 1}, {0, 0, 2}}) == 0.0);
            }
    }
}

TEST_CASE("same-point specialization recovers the stationary moments") {
    int p = 5, q = 3;
    // Gradient variance p, resp. q; value-gradient and Hessian-gradient vanish.
    CHECK(table_entry(p, q, 1.0, 1.0, {{0, 0, 1}, {1, 0, 1}}) == doctest::Approx(p));
    CHECK(table_entry(p, q, 1.0, 1.0, {{0, 0, 2}, {1, 0, 2}}) == doctest::Approx(p));
    CHECK(table_entry(p, q, 1.0, 1.0, {{0, 1, 1}, {1, 1, 1}}) == doctest::Approx(q));
    CHECK(table_entry(p, q, 1.0, 1.0, {{0, 0, 1}}) == 0.0);
    CHECK(table_entry(p, q, 1.0, 1.0, {{0, 0, 1}, {0, 0, 1}, {1, 0, 1}}) == 0.0);
}

TEST_CASE("sigma_L determinant: assembled vs closed form") {
    CHECK(assemble_sigma_L(4, 6, 0.0, 0.0).determinant() ==
          doctest::Approx(16.0 * 36.0).epsilon(1e-14));
    CHECK(det_sigma_L_closed(4, 6, 0.0, 0.0) == doctest::Approx(16.0 * 36.0).epsilon(1e-14));
    for (auto [p, q] : {std::pair{3, 3}, {5, 7}, {10, 4}}) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i)
            for (int j = 0; j < 100; ++j) {
                double r = -0.99 + 1.98 * i / 99.0;
                double t = -0.99 + 1.98 * j / 99.0;
                double da = assemble_sigma_L(p, q, r, t).determinant();
                double dc = det_sigma_L_closed(p, q, r, t);
                worst = std::max(worst, std::abs(da - dc) / std::max(1.0, std::abs(dc)));
            }
        INFO("p=", p, " q=", q);
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("f_L bound and positive definiteness on the open square") {
    for (auto [p, q] : {std::pair{3, 3}, {5, 7}}) {
        double fl_bound = 0.0;
        double min_eig_L = 1e300, min_eig_E = 1e300;
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) {
                double r = -0.99 + 1.98 * i / 49.0;
                double t = -0.99 + 1.98 * j / 49.0;
                fl_bound = std::max(fl_bound, f_L(p, q, r, t) * (2.0 - r * r - t * t));
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> esL(
                    assemble_sigma_L(p, q, r, t));
                min_eig_L = std::min(min_eig_L, esL.eigenvalues().minCoeff());
                Eigen::Matrix2d se = assemble_sigma_E(p, q, r, t);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> esE(se);
                min_eig_E = std::min(min_eig_E, esE.eigenvalues().minCoeff());
                // Conditioning cannot increase variances: the diagonal stays
                // at most 1 and the unconditional covariance dominates in the
                // PSD order.
                CHECK(se(0, 0) <= 1.0 + 1e-12);
                CHECK(se(1, 1) <= 1.0 + 1e-12);
                double v = pow_i(r, p) * pow_i(t, q);
                Eigen::Matrix2d gap;
                gap << 1.0 - se(0, 0), v - se(0, 1), v - se(1, 0), 1.0 - se(1, 1);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> esG(gap);
                CHECK(esG.eigenvalues().minCoeff() >= -1e-12);
            }
        CHECK(min_eig_L > 0.0);
        CHECK(min_eig_E > 0.0);
        CHECK(std::isfinite(fl_bound));
        MESSAGE("f_L (2 - r^2 - t^2) <= ", fl_bound, " for p=", p, " q=", q);
    }
}

TEST_CASE("sigma_E at the origin is the identity") {
    for (auto [p, q] : {std::pair{2, 2}, {3, 4}, {7, 7}}) {
        Eigen::Matrix2d se = assemble_sigma_E(p, q, 0.0, 0.0);
        CHECK((se - Eigen::Matrix2d::Identity()).norm() == 0.0);
    }
}

TEST_CASE("sigma_E inverse identity against the k closed form") {
    // The identity value blows up where (1,1) aligns with the vanishing
    // eigvector of Sigma_E (|r|,|t| -> 1 with r^p t^q < 0), so the error is
    // measured relative to the magnitude there.
    for (auto [p, q] : {std::pair{3, 3}, {5, 7}}) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i)
            for (int j = 0; j < 100; ++j) {
                double r = -0.99 + 1.98 * i / 99.0;
                double t = -0.99 + 1.98 * j / 99.0;
                Eigen::Matrix2d se = assemble_sigma_E(p, q, r, t);
                Eigen::Vector2d ones = Eigen::Vector2d::Ones();
                double lhs = -0.5 * ones.dot(se.llt().solve(ones));
                double rhs = -1.0 + k_func(p, q, {r, t});
                worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
        INFO("p=", p, " q=", q);
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("corner Hessian display matrix is strictly positive definite") {
    for (int p = 2; p <= 12; ++p)
        for (int q = 2; q <= 12; ++q) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(corner_hessian_display(p, q));
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
}

namespace {

// Analytic gradient of the closed-form determinant polynomial.
std::pair<double, double> det_closed_grad(int p, int q, double r, double t) {
    double r2 = r * r, t2 = t * t;
    double c1 = 2.0 * p * q * (1 - r2) * (1 - t2) + 2.0 * q * r2 + 2.0 * p * t2 +
                p * p * (r2 - 2.0) * t2 + q * q * (t2 - 2.0) * r2;
    double b1 = (p - 1.0) * (p - 1.0) * t2 * t2 + (q - 1.0) * (q - 1.0) * r2 * r2 +
                r2 * t2 * c1;
    double b2 = p * (1 - r2) + q * (1 - t2) - 1.0;
    double dc1_dr = -4.0 * p * q * r * (1 - t2) + 4.0 * q * r + 2.0 * p * p * r * t2 +
                    2.0 * q * q * (t2 - 2.0) * r;
    double dc1_dt = -4.0 * p * q * t * (1 - r2) + 4.0 * p * t + 2.0 * q * q * t * r2 +
                    2.0 * p * p * (r2 - 2.0) * t;
    double db1_dr = 4.0 * (q - 1.0) * (q - 1.0) * r * r2 + 2.0 * r * t2 * c1 +
                    r2 * t2 * dc1_dr;
    double db1_dt = 4.0 * (p - 1.0) * (p - 1.0) * t * t2 + 2.0 * t * r2 * c1 +
                    r2 * t2 * dc1_dt;
    double R = pow_i(r, 2 * p - 4) * pow_i(t, 2 * q - 4);
    double S = pow_i(r, 4 * p - 4) * pow_i(t, 4 * q - 4);
    double dR_dr = p == 2 ? 0.0 : (2 * p - 4) * pow_i(r, 2 * p - 5) * pow_i(t, 2 * q - 4);
    double dR_dt = q == 2 ? 0.0 : (2 * q - 4) * pow_i(t, 2 * q - 5) * pow_i(r, 2 * p - 4);
    double dS_dr = (4 * p - 4) * pow_i(r, 4 * p - 5) * pow_i(t, 4 * q - 4);
    double dS_dt = (4 * q - 4) * pow_i(t, 4 * q - 5) * pow_i(r, 4 * p - 4);
    double s = static_cast<double>(p) * p * q * q;
    double gr = s * (-dR_dr * b1 - R * db1_dr + dS_dr * b2 * b2 +
                     S * 2.0 * b2 * (-2.0 * p * r));
    double gt = s * (-dR_dt * b1 - R * db1_dt + dS_dt * b2 * b2 +
                     S * 2.0 * b2 * (-2.0 * q * t));
    return {gr, gt};
}

}  // namespace

TEST_CASE("corner expansion of the determinant polynomial") {
    // The analytic gradient itself must match central differences somewhere
    // generic, then vanish at the four corners together with the value.
    for (auto [p, q] : {std::pair{3, 3}, {5, 7}, {2, 6}}) {
        auto [gr0, gt0] = det_closed_grad(p, q, 0.4, -0.6);
        double h = 1e-6;
        double fdr = (det_sigma_L_closed(p, q, 0.4 + h, -0.6) -
                      det_sigma_L_closed(p, q, 0.4 - h, -0.6)) /
                     (2.0 * h);
        double fdt = (det_sigma_L_closed(p, q, 0.4, -0.6 + h) -
                      det_sigma_L_closed(p, q, 0.4, -0.6 - h)) /
                     (2.0 * h);
        CHECK(gr0 == doctest::Approx(fdr).epsilon(1e-5));
        CHECK(gt0 == doctest::Approx(fdt).epsilon(1e-5));
        for (double sr : {-1.0, 1.0})
            for (double st : {-1.0, 1.0}) {
                CHECK(std::abs(det_sigma_L_closed(p, q, sr, st)) <= 1e-8);
                auto [gr, gt] = det_closed_grad(p, q, sr, st);
                CHECK(std::abs(gr) <= 1e-8);
                CHECK(std::abs(gt) <= 1e-8);
            }
    }
}

TEST_CASE("conditional corner variance") {
    SUBCASE("at the origin it is the sum of two stationary Hessian variances") {
        for (auto [p, q] : {std::pair{3, 3}, {4, 6}}) {
            CornerVariance cv = conditional_corner_variance(p, q, 0.0, 0.0);
            // Var(E_1E_1 h) = p(3p-2), Var(E_1E^1 h) = pq, and the cross term
            // vanishes; oracle at tolerance 1e-6.
            double expect = p * (3.0 * p - 2.0) + p * q;
            CHECK(std::abs(cv.variance - expect) < 1e-6);
            CHECK(cv.ratio == doctest::Approx(cv.variance / 4.0).epsilon(1e-12));
        }
    }
    SUBCASE("bounded ratio and vanishing variance along r = t -> 1") {
        double prev_var = 1e300;
        for (int k = 1; k <= 10; ++k) {
            double r = 1.0 - std::pow(2.0, -k);
            CornerVariance cv = conditional_corner_variance(3, 3, r, r);
            CHECK(std::isfinite(cv.ratio));
            CHECK(cv.ratio >= -1e-6);
            CHECK(cv.ratio <= 1e3);
            if (k >= 4) CHECK(cv.variance <= prev_var + 1e-9);
            prev_var = cv.variance;
        }
    }
}

TEST_CASE("covariance bundle coherence") {
    CovarianceBundle b = make_covariance_bundle(4, 5, 0.3, -0.4);
    CHECK(std::abs(b.sigma_L.determinant() - b.det_closed) <= 1e-8 * std::abs(b.det_closed));
    CHECK(b.f_L_value ==
          doctest::Approx(1.0 / (4.0 * M_PI * M_PI * std::sqrt(b.det_closed))).epsilon(1e-12));
    Eigen::Matrix2d recon =
        b.value_block - b.cross_block * b.sigma_L.ldlt().solve(b.cross_block.transpose());
    CHECK((recon - b.sigma_E).norm() <= 1e-12);
}
