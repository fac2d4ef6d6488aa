#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "singbif/sandbox.hpp"
#include "singbif/shooting.hpp"
#include "singbif/specfun.hpp"

using namespace singbif;
using namespace singbif::sandbox;

TEST_CASE("model hypotheses: vanishing gradients with superlinear decay") {
    for (const SandboxModel& m : {make_default_model(), make_galerkin_model()}) {
        Vec dir = Vec::Ones(m.n).normalized();
        double prev_h = 1e300, prev_h1 = 1e300;
        for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const Vec u = r * dir;
            if (m.H) {
                const double ratio = m.H.grad(u).norm() / u.norm();
                CHECK(ratio < prev_h);
                prev_h = ratio;
            }
            if (m.H1) {
                const double ratio = m.H1.grad(u).norm() / u.norm();
                CHECK(ratio < prev_h1);
                prev_h1 = ratio;
            }
        }
        if (m.H) CHECK(m.H.value(Vec::Zero(m.n)) == 0.0);
        if (m.H1) CHECK(m.H1.value(Vec::Zero(m.n)) == 0.0);
    }
}

TEST_CASE("coercivity constants hold on sampled directions") {
    for (const SandboxModel& m : {make_default_model(), make_galerkin_model()}) {
        for (int j = 0; j < m.n; ++j) {
            const Vec u = m.evecs.col(j);
            const double quad = u.dot(m.K * u);
            const double strong = u.dot(m.W * u);
            CHECK(quad >= m.nu * strong - m.m_coerc * u.squaredNorm() - 1e-12);
        }
    }
}

TEST_CASE("spectral-gap regime validation rejects bad parameters") {
    SandboxModel m = make_default_model();
    m.eps0 = 0.5;  // 5 eps0 = 2.5 overflows the lower gap of 1
    CHECK_THROWS_AS(finalize_model(m), std::invalid_argument);
    SandboxModel m2 = make_default_model();
    m2.lambda_hat = 2.3;  // not an eigenvalue
    CHECK_THROWS_AS(finalize_model(m2), std::invalid_argument);
    SandboxModel m3 = make_default_model();
    m3.delta = 0.5;  // outside the contraction regime
    CHECK_THROWS_AS(finalize_model(m3), std::invalid_argument);
}

TEST_CASE("scaled functionals: homogeneous potentials scale out, gradients check") {
    const SandboxModel m = make_default_model();
    Vec u(5);
    u << 0.3, 1.2, -0.4, 0.2, -0.1;
    // quartic part scales like rho^2
    const Functionals f1 = scaled_functionals(m, 0.1, u);
    const Functionals f0 = scaled_functionals(m, 0.0, u);
    const double quartic = 0.25 * u.array().pow(4).sum();
    CHECK(f1.f - f0.f == doctest::Approx(0.01 * quartic).epsilon(1e-12));
    // finite-difference gradient check
    for (int j = 0; j < 5; ++j) {
        const double eps = 1e-6;
        Vec up = u, dn = u;
        up(j) += eps;
        dn(j) -= eps;
        const double fd = (scaled_functionals(m, 0.1, up).f -
                           scaled_functionals(m, 0.1, dn).f) /
                          (2.0 * eps);
        CHECK(f1.grad_f(j) == doctest::Approx(fd).epsilon(1e-6));
        const double fdg = (scaled_functionals(m, 0.1, up).g -
                            scaled_functionals(m, 0.1, dn).g) /
                           (2.0 * eps);
        CHECK(f1.grad_g(j) == doctest::Approx(fdg).epsilon(1e-6));
    }
}

TEST_CASE("zero potentials make f_rho coincide with the quadratic part") {
    SandboxModel m = make_default_model();
    m.H = ScalarField{};
    m.H1 = ScalarField{};
    finalize_model(m);
    Vec u(5);
    u << 0.5, 1.0, 0.5, -0.3, 0.1;
    for (double rho : {0.0, 0.1, 0.7}) {
        const Functionals f = scaled_functionals(m, rho, u);
        CHECK(f.f == 0.5 * u.dot(m.K * u));
        CHECK(f.g == 0.5 * u.squaredNorm());
    }
}

TEST_CASE("projection: fixed point, composition round trip, boundary preservation") {
    const SandboxModel m = make_default_model();
    Vec u(5);
    u << 0.2, 0.9, 0.8, 0.3, -0.2;
    // a point already on S_0 projects to itself at rho = 0
    const Vec s0 = std::sqrt(2.0) * u.normalized();
    CHECK((sphere_project(m, 0.0, s0).point - s0).norm() < 1e-12);
    // round trip between the rho and 0 spheres
    for (double rho : {0.05, 0.15}) {
        const Vec on_rho = sphere_project(m, rho, s0).point;
        const Vec back = sphere_project(m, 0.0, on_rho).point;
        CHECK((back - s0).norm() < 1e-10);
    }
    // points with degenerate component pinned at delta stay pinned
    Vec b = m.pi13(u) + m.delta * m.pi2(u) / m.pi2(u).norm();
    const Vec pb = sphere_project(m, 0.1, b).point;
    CHECK(m.pi2(pb).norm() == doctest::Approx(m.delta).epsilon(1e-12));
    // outside the collar the projection refuses
    Vec far = u;
    far -= m.pi2(far);
    CHECK_THROWS_AS(sphere_project(m, 0.1, far), std::invalid_argument);
}

TEST_CASE("pure eigenvalue problem: degenerate directions are critical") {
    SandboxModel m = make_default_model();
    m.H = ScalarField{};
    m.H1 = ScalarField{};
    finalize_model(m);
    for (double rho : {0.1, 0.02}) {
        auto [p1, p2] = find_critical_pairs(m, rho);
        CHECK(p1.lambda == doctest::Approx(m.lambda_hat).epsilon(1e-10));
        CHECK(p2.lambda == doctest::Approx(m.lambda_hat).epsilon(1e-10));
        CHECK(m.pi13(p1.u).norm() < 1e-8);
        CHECK((p1.u - p2.u).norm() > 1e-6);
    }
}

TEST_CASE("default model: multiplier convergence, window, exclusion, corrections") {
    const SandboxModel m = make_default_model();
    double prev1 = 1e300, prev2 = 1e300, prev_c1 = 1e300, prev_c2 = 1e300;
    for (double rho : m.default_sweep) {
        auto [p1, p2] = find_critical_pairs(m, rho);
        CHECK(p1.kkt_residual <= 1e-8);
        CHECK(p2.kkt_residual <= 1e-8);
        CHECK((p1.u - p2.u).norm() > 1e-6);
        const double e1 = std::fabs(p1.lambda - m.lambda_hat);
        const double e2 = std::fabs(p2.lambda - m.lambda_hat);
        CHECK(e1 < prev1);
        CHECK(e2 < prev2);
        prev1 = e1;
        prev2 = e2;
        // f-window of the located pair
        const double eps = m.eps0 / 2.0;
        CHECK(p1.f_val >= m.lambda_hat - 3.0 * eps);
        CHECK(p2.f_val <= m.lambda_hat + 2.0 * eps);
        CHECK(boundary_exclusion_check(m, rho, p1));
        CHECK(boundary_exclusion_check(m, rho, p2));
        // multiplier identity f = C1 + lambda (1 + C2)
        auto [c1, c2] = correction_terms(m, rho, p1.u);
        CHECK(p1.f_val == doctest::Approx(c1 + p1.lambda * (1.0 + c2)).epsilon(1e-9));
        CHECK(std::fabs(c1) < prev_c1);
        CHECK(std::fabs(c2) < prev_c2);
        prev_c1 = std::fabs(c1);
        prev_c2 = std::fabs(c2);
        // the rescaled point solves the unscaled stationarity equation
        const Vec v = rho * p1.u;
        const Vec resid = m.K * v + m.H.grad(v) - p1.lambda * (v + m.H1.grad(v));
        CHECK(resid.norm() <= 1e-8);
    }
}

TEST_CASE("level bounds: closed forms at rho = 0 and the ordering chain") {
    for (const SandboxModel& m : {make_default_model(), make_galerkin_model()}) {
        const auto closed = level_bounds_quadratic(m);
        const LevelBounds lb0 = level_bounds(m, 0.0);
        CHECK(lb0.a_prime == doctest::Approx(closed.first).epsilon(1e-10));
        CHECK(lb0.b_dprime == doctest::Approx(closed.second).epsilon(1e-10));

        const double rho = m.default_sweep.back();
        const LevelBounds lb = level_bounds(m, rho);
        const double eps = m.eps0 / 2.0;
        CHECK(lb.a_prime <= m.lambda_below + m.eps0 + 1e-9);
        CHECK(m.lambda_below + m.eps0 < m.lambda_hat - 4.0 * eps);
        CHECK(m.lambda_hat - eps <= lb.a_dprime + 1e-9);
        CHECK(lb.a_dprime <= lb.b_prime + 1e-9);
        CHECK(lb.b_prime <= m.lambda_hat + eps + 1e-9);
        CHECK(m.lambda_hat + 4.0 * eps < m.lambda_above - m.eps0);
        CHECK(m.lambda_above - m.eps0 <= lb.b_dprime + 1e-9);
    }
}

TEST_CASE("boundary exclusion rejects a hand-built low boundary point") {
    const SandboxModel m = make_default_model();
    const Vec e1 = m.evecs.col(m.idx1[0]);
    const Vec e2 = m.evecs.col(m.idx2[0]);
    Vec u = m.delta * e2 + std::sqrt(2.0 - m.delta * m.delta) * e1;
    CriticalPair fake;
    fake.u = sphere_project(m, 0.05, u).point;
    fake.mu = 0.0;
    fake.f_val = scaled_functionals(m, 0.05, fake.u).f;
    CHECK(fake.f_val < m.lambda_below + m.eps0);  // low-level boundary point
    CHECK_FALSE(boundary_exclusion_check(m, 0.05, fake));
}

TEST_CASE("galerkin model: multipliers approach the table eigenvalue") {
    const SandboxModel g = make_galerkin_model();
    double prev = 1e300;
    for (double rho : g.default_sweep) {
        auto [p1, p2] = find_critical_pairs(g, rho);
        CHECK(p1.kkt_residual <= 1e-8);
        CHECK(p2.kkt_residual <= 1e-8);
        const double err = std::max(std::fabs(p1.lambda - g.lambda_hat),
                                    std::fabs(p2.lambda - g.lambda_hat));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.05 * g.lambda_hat);
}

TEST_CASE("galerkin pair matches the traced radial branch near onset") {
    const SandboxModel g = make_galerkin_model();
    const double rho = 0.02;
    auto [p1, p2] = find_critical_pairs(g, rho);
    // pick the sheet with positive center value
    const auto center_value = [&](const CriticalPair& p) {
        double v = 0.0;
        const specfun::EigenTable t = specfun::build_eigen_table(1.0, g.n - 1);
        v += rho * p.u(0) * std::sqrt(2.0);  // constant mode at the center
        for (int k = 1; k < g.n; ++k) {
            const double nk =
                std::fabs(specfun::bessel_j0(t.y[static_cast<std::size_t>(k - 1)])) /
                std::sqrt(2.0);
            v += rho * p.u(k) / nk;
        }
        return v;
    };
    const CriticalPair& plus = center_value(p1) > 0.0 ? p1 : p2;
    const double v0 = center_value(plus);
    REQUIRE(v0 > 0.0);

    // matched-amplitude shooting solution: lambda* = mu/2, h = v0/sqrt(lambda*)
    const double lambda_star = plus.lambda / 2.0;
    const double h = v0 / std::sqrt(lambda_star);
    shooting::TraceControls ctl;
    ode::RadialTrajectory traj;
    shooting::solve_lambda(1, h, lambda_star - 0.4, lambda_star + 0.4, 1.0, ctl, &traj);

    // project sqrt(lambda) w onto the retained modes and compare coefficients
    const specfun::EigenTable t = specfun::build_eigen_table(1.0, g.n - 1);
    Vec proj(g.n);
    const int q = 600;
    for (int k = 0; k < g.n; ++k) {
        const double nk = k == 0 ? 1.0 / std::sqrt(2.0)
                                 : std::fabs(specfun::bessel_j0(
                                       t.y[static_cast<std::size_t>(k - 1)])) /
                                       std::sqrt(2.0);
        double acc = 0.0;
        for (int i = 0; i < q; ++i) {
            const double r = (i + 0.5) / q;
            const double basis =
                k == 0 ? 1.0 / nk
                       : specfun::bessel_j0(t.y[static_cast<std::size_t>(k - 1)] * r) / nk;
            acc += r * std::sqrt(traj.lambda) * traj.w_at(r) * basis / q;
        }
        proj(k) = acc;
    }
    const Vec sandbox_coeffs = rho * plus.u;
    CHECK((proj - sandbox_coeffs).norm() / sandbox_coeffs.norm() < 0.10);
}
