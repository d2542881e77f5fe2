#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glass/complexity.hpp"
#include "helpers.hpp"

using namespace glass;
using glass::testing::make_semicircle_measure;
using glass::testing::semicircle_log_potential_oracle;

TEST_CASE("omega_sc closed form") {
    CHECK(omega_sc(0.0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(omega_sc(2.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Branch continuity at |E| = 2.
    CHECK(omega_sc(2.0 + 1e-9) == doctest::Approx(omega_sc(2.0 - 1e-9)).epsilon(1e-7));
    // Independent quadrature oracle at E = 3.
    double oracle = semicircle_log_potential_oracle(3.0);
    CHECK(std::abs(omega_sc(3.0) - oracle) < 1e-8);
    // Evenness.
    for (double E : {0.3, 1.7, 2.5, 6.0}) CHECK(omega_sc(E) == omega_sc(-E));
}

TEST_CASE("constant_C examples and swap symmetry") {
    CHECK(constant_C({2, 2, 0.5}) == doctest::Approx(0.5 * (1.0 + std::log(4.0))).epsilon(1e-15));
    CHECK(constant_C({96, 96, 0.5}) ==
          doctest::Approx(0.5 * (1.0 + std::log(192.0))).epsilon(1e-15));
    for (auto [p, q, g] : {std::tuple{3, 7, 0.3}, {5, 2, 0.8}, {11, 4, 0.45}}) {
        ModelParams prm{p, q, g};
        CHECK(constant_C(prm) == doctest::Approx(constant_C(prm.swapped())).epsilon(1e-14));
    }
}

TEST_CASE("threshold_eth") {
    CHECK(threshold_eth({96, 96, 0.25}) ==
          doctest::Approx(std::sqrt(2.0 * std::log(95.0))).epsilon(1e-15));
    CHECK(threshold_eth({96, 96, 0.5}) == doctest::Approx(3.0179055292041665).epsilon(1e-12));
    CHECK(threshold_eth({2, 2, 0.7}) == 0.0);
    CHECK(threshold_eth({10, 10, 0.2}) == threshold_eth({10, 10, 0.9}));
    CHECK(threshold_eth({10, 10, 0.2}) ==
          doctest::Approx(std::sqrt(2.0 * std::log(9.0))).epsilon(1e-15));
}

TEST_CASE("log_potential quadrature vs closed forms") {
    SpectralMeasure unit = make_semicircle_measure(1.0);
    // Inside the support the subtracted-singularity quadrature must match
    // the closed form E^2/4 - 1/2.
    for (double E : {0.0, 0.3, 0.7, 1.5, 1.9}) {
        CHECK(std::abs(log_potential(unit, E) - omega_sc(E)) < 1e-8);
    }
    // Outside.
    for (double E : {2.5, 3.0, 5.0}) {
        CHECK(std::abs(log_potential(unit, E) - omega_sc(E)) < 1e-8);
    }
}

TEST_CASE("log_potential scaling identity") {
    // Omega_{sqrt(s)-dilate}(E) = log sqrt(s) + Omega_sc(E / sqrt(s)).
    for (double s : {5.0 / 6.0, 0.4, 2.0}) {
        SpectralMeasure m = make_semicircle_measure(s);
        double a = std::sqrt(s);
        for (double E : {0.5, 1.0, 3.0}) {
            double expect = std::log(a) + omega_sc(E / a);
            CHECK(std::abs(log_potential(m, E) - expect) < 1e-8);
        }
    }
}

TEST_CASE("log_potential far-field normalization") {
    SpectralMeasure m = make_semicircle_measure(5.0 / 6.0);
    double E = 1e6;
    CHECK(std::abs(log_potential(m, E) - std::log(E)) < 1e-6);
}

TEST_CASE("log_potential evenness for a symmetric measure") {
    SpectralMeasure m = make_semicircle_measure(5.0 / 6.0, 100001);
    for (double E : {0.4, 1.1, 2.2, 3.0})
        CHECK(std::abs(log_potential(m, E) - log_potential(m, -E)) < 1e-8);
}

TEST_CASE("regularized log potential") {
    SpectralMeasure m = make_semicircle_measure(1.0, 100001);
    double edge = 2.0;
    SUBCASE("taylor bound at E = 2 edge") {
        double E = 2.0 * edge, eps = 1e-3;
        double dist = E - edge;
        CHECK(regularized_log_potential(m, E, eps) >= log_potential(m, E) - 1e-12);
        CHECK(std::abs(regularized_log_potential(m, E, eps) - log_potential(m, E)) <=
              eps * eps / (2.0 * dist * dist));
    }
    SUBCASE("even in E, monotone in eps") {
        for (double eps : {1e-3, 1e-2, 0.1}) {
            CHECK(std::abs(regularized_log_potential(m, 1.3, eps) -
                           regularized_log_potential(m, -1.3, eps)) < 1e-10);
            CHECK(regularized_log_potential(m, 0.7, 2.0 * eps) >=
                  regularized_log_potential(m, 0.7, eps) - 1e-14);
        }
    }
}

TEST_CASE("sigma_upper_bound") {
    for (auto prm : {ModelParams{3, 3, 0.5}, ModelParams{7, 4, 0.3}}) {
        CHECK(sigma_upper_bound(prm, 0.0) ==
              doctest::Approx(constant_C(prm) - 0.5).epsilon(1e-14));
        for (double E : {0.5, 1.9, 3.3})
            CHECK(sigma_upper_bound(prm, E) ==
                  doctest::Approx(sigma_upper_bound(prm, -E)).epsilon(1e-14));
    }
}

TEST_CASE("f_gamma") {
    // sup over gamma of f(gamma, 3) is 1, attained at the endpoints.
    CHECK(f_gamma(0.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f_gamma(1.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        double g = k / 1000.0;
        worst = std::max(worst, f_gamma(g, 3.0));
        CHECK(f_gamma(g, 3.0) == doctest::Approx(f_gamma(1.0 - g, 3.0)).epsilon(1e-12));
    }
    CHECK(worst <= 1.0 + 1e-9);
    // E/sqrt(gamma) = 1.8/sqrt(0.9) < 2: the bound is vacuous there.
    CHECK_THROWS_AS(f_gamma(0.9, 1.8), std::invalid_argument);
}

TEST_CASE("sigma_hat at the threshold") {
    double eth = std::sqrt(2.0 * std::log(95.0));
    CHECK(std::abs(sigma_hat(0.5, eth) - (-0.002782)) < 1e-5);
    CHECK(sigma_hat(0.5, eth) == doctest::Approx(-0.0027826270652591).epsilon(1e-10));
    // Concavity + symmetry put the gamma-supremum at 1/2.
    for (double g : {0.1, 0.25, 0.4})
        CHECK(sigma_hat(g, eth) <= sigma_hat(0.5, eth) + 1e-12);
    CHECK(std::isfinite(sigma_hat(0.0, eth)));
    CHECK(std::isfinite(sigma_hat(1.0, eth)));
}

TEST_CASE("find_e0 on the collapsed model") {
    // (3,3,0.5) is the variance-5/6 semicircle; Sigma has a unique positive
    // zero between the support edge and 2.
    ModelParams prm{3, 3, 0.5};
    SpectralMeasure m = make_semicircle_measure(5.0 / 6.0, 200001);
    double e_inf = 2.0 * std::sqrt(5.0 / 6.0);
    double e0 = find_e0(prm, m, e_inf);
    CHECK(e0 > e_inf);
    CHECK(e0 < 2.0);
    CHECK(std::abs(sigma(prm, m, e0)) <= 1e-8);
    auto brackets = sigma_sign_changes(prm, m, e_inf);
    CHECK(brackets.size() == 1);
}

TEST_CASE("complexity report invariants") {
    ModelParams prm{3, 3, 0.5};
    SpectralMeasure m = make_semicircle_measure(5.0 / 6.0, 200001);
    ComplexityReport rep = build_complexity_report(prm, m, 401);
    CHECK(rep.c_const == doctest::Approx(constant_C(prm)).epsilon(1e-15));
    CHECK(std::abs(rep.e_inf - 2.0 * std::sqrt(5.0 / 6.0)) <= 1e-3);
    CHECK(std::abs(glass::sigma(prm, m, rep.e_zero)) <= 1e-8);
    CHECK(rep.sign_changes.size() == 1);
    Eigen::Index n = rep.e_grid.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        double E = rep.e_grid[i];
        // sigma = C - E^2/2 + omega pointwise.
        CHECK(rep.sigma[i] ==
              doctest::Approx(rep.c_const - 0.5 * E * E + rep.omega[i]).epsilon(1e-14));
        // Dominated by the closed-form upper bound.
        CHECK(rep.sigma[i] <= rep.upper_bound[i] + 1e-8);
        // Even grid restriction.
        CHECK(std::abs(rep.sigma[i] - rep.sigma[n - 1 - i]) <= 1e-8);
        // Negative strictly left of -e_zero.
        if (E < -rep.e_zero - 1e-6) CHECK(rep.sigma[i] < 0.0);
    }
    // c1 * 3 constant from the E0-bound proof.
    CHECK(std::abs(std::sqrt(95.0 / 96.0) * 3.0 - 2.98) <= 1e-2);
}

TEST_CASE("sigma is even and concave beyond the edge") {
    // Sigma'' = -1 - int (x-E)^{-2} dmu < 0 on |E| > edge, so the curve is
    // strictly concave there; together with the single sign change this pins
    // the zero E0 as unique.
    ModelParams prm{3, 3, 0.5};
    SpectralMeasure m = make_semicircle_measure(5.0 / 6.0, 200001);
    for (double E : {0.4, 1.2, 2.1})
        CHECK(std::abs(sigma(prm, m, E) - sigma(prm, m, -E)) < 1e-9);
    double h = 0.01;
    for (double E = 1.84; E < 3.0; E += 0.05) {
        double dd = sigma(prm, m, E - h) - 2.0 * sigma(prm, m, E) + sigma(prm, m, E + h);
        CHECK(dd <= 1e-8);
        // Away from the edge the curvature is of order one; it diverges like
        // -(E - edge)^{-1/2} at the edge itself.
        if (E > 2.0) CHECK(dd >= -2.5 * h * h);
    }
}
