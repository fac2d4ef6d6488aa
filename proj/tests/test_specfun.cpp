#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "singbif/specfun.hpp"

using namespace singbif::specfun;

TEST_CASE("j0 basics and symmetry") {
    CHECK(bessel_j0(0.0) == 1.0);
    for (double x : {0.3, 1.7, 4.9, 11.2, 40.0, 123.0})
        CHECK(bessel_j0(-x) == bessel_j0(x));
    CHECK_THROWS_AS(bessel_j0(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(bessel_j0(INFINITY), std::domain_error);
}

TEST_CASE("j0 matches the independent series oracle on its reliable range") {
    for (double x = 0.0; x <= 6.0; x += 0.37)
        CHECK(bessel_j0(x) == doctest::Approx(oracles::j0_series30(x)).epsilon(1e-13));
}

TEST_CASE("first zero of j0 against the bisection oracle") {
    const double z1 =
        oracles::bisect([](double t) { return oracles::j0_series30(t); }, 2.0, 3.0);
    CHECK(z1 == doctest::Approx(2.404825557695773).epsilon(1e-12));
    CHECK(j0_zeros(1)[0] == doctest::Approx(z1).epsilon(1e-12));
    CHECK(std::fabs(bessel_j0(j0_zeros(1)[0])) < 1e-14);
}

TEST_CASE("first nontrivial zero of j0' against the bisection oracle") {
    const double y1 =
        oracles::bisect([](double t) { return oracles::j1_series30(t); }, 3.0, 4.0);
    CHECK(y1 == doctest::Approx(3.831705970207512).epsilon(1e-12));
    CHECK(j0_prime_zeros(1)[0] == doctest::Approx(y1).epsilon(1e-12));
}

TEST_CASE("j0' is consistent with finite differences of j0") {
    CHECK(bessel_j0_prime(0.0) == 0.0);
    for (double x : {0.5, 2.0, 7.3, 13.9, 22.0, 49.5}) {
        const double fd =
            oracles::fd_derivative([](double t) { return bessel_j0(t); }, x);
        CHECK(bessel_j0_prime(x) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("series/asymptotic handoff is seamless") {
    // both evaluation branches must agree near the switch point
    for (double x = 15.5; x <= 16.5; x += 0.01) {
        const double fd = oracles::fd_derivative(
            [](double t) { return bessel_j0(t); }, x, 1e-5);
        CHECK(bessel_j0_prime(x) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("eigen table invariants") {
    const EigenTable t = build_eigen_table(1.0, 20);
    REQUIRE(t.kmax == 20);
    for (int k = 0; k < 20; ++k) {
        CHECK(t.y[k] > 0.0);
        CHECK(t.z[k] > 0.0);
        if (k > 0) {
            CHECK(t.y[k] > t.y[k - 1]);
            CHECK(t.z[k] > t.z[k - 1]);
        }
        // stored zeros really are zeros
        CHECK(std::fabs(bessel_j0(t.z[k])) <= 1e-10);
        CHECK(std::fabs(bessel_j0_prime(t.y[k])) <= 1e-10);
        // stored eigenvalues recompute exactly
        CHECK(t.mu[k] == (t.y[k] / t.radius) * (t.y[k] / t.radius));
        CHECK(t.nu[k] == (t.z[k] / t.radius) * (t.z[k] / t.radius));
        // interlacing
        CHECK(t.nu[k] < t.mu[k]);
        if (k + 1 < 20) CHECK(t.mu[k] < t.nu[k + 1]);
    }
}

TEST_CASE("frozen first eigenvalues at R = 1") {
    const EigenTable t = build_eigen_table(1.0, 1);
    CHECK(t.mu_k(1) == doctest::Approx(14.68197064).epsilon(1e-9));
    CHECK(t.nu_k(1) == doctest::Approx(5.78318596).epsilon(1e-9));
}

TEST_CASE("eigenvalue scaling in the radius") {
    const EigenTable t1 = build_eigen_table(1.0, 6);
    const EigenTable t2 = build_eigen_table(2.0, 6);
    for (int k = 1; k <= 6; ++k) {
        CHECK(t2.mu_k(k) == doctest::Approx(t1.mu_k(k) / 4.0).epsilon(1e-14));
        CHECK(t2.nu_k(k) == doctest::Approx(t1.nu_k(k) / 4.0).epsilon(1e-14));
    }
}

TEST_CASE("eigenfunctions: center value, boundary node, sign changes") {
    const EigenTable t = build_eigen_table(1.0, 4);
    for (int k = 1; k <= 4; ++k) {
        CHECK(t.eigenfunction(EigenKind::neumann, k, 0.0) == 1.0);
        CHECK(std::fabs(t.eigenfunction(EigenKind::dirichlet, k, t.radius)) < 1e-10);
        // node count of w_k on ]0,R[ equals k
        int changes = 0;
        double prev = t.eigenfunction(EigenKind::neumann, k, 1e-9);
        for (int i = 1; i < 10000; ++i) {
            const double v = t.eigenfunction(EigenKind::neumann, k, i / 10000.0);
            if (prev * v < 0.0) ++changes;
            prev = v;
        }
        CHECK(changes == k);
    }
    CHECK_THROWS_AS(t.eigenfunction(EigenKind::neumann, 0, 0.5), std::out_of_range);
    CHECK_THROWS_AS(t.eigenfunction(EigenKind::neumann, 5, 0.5), std::out_of_range);
    CHECK_THROWS_AS(t.eigenfunction(EigenKind::neumann, 1, 1.5), std::domain_error);
}

TEST_CASE("neumann condition at the boundary via finite differences") {
    const EigenTable t = build_eigen_table(1.0, 5);
    for (int k = 1; k <= 5; ++k) {
        // second-order one-sided difference (the domain ends at R)
        const double eps = 1e-5;
        const double f0 = t.eigenfunction(EigenKind::neumann, k, 1.0);
        const double f1 = t.eigenfunction(EigenKind::neumann, k, 1.0 - eps);
        const double f2 = t.eigenfunction(EigenKind::neumann, k, 1.0 - 2.0 * eps);
        const double fd = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * eps);
        CHECK(std::fabs(fd) < 1e-8);
    }
}

TEST_CASE("build_eigen_table input validation") {
    CHECK_THROWS_AS(build_eigen_table(0.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_eigen_table(1.0, 0), std::invalid_argument);
}
