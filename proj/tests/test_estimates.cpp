#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "singbif/estimates.hpp"
#include "singbif/shooting.hpp"
#include "singbif/specfun.hpp"

using namespace singbif;
using namespace singbif::estimates;

namespace {

ode::RadialTrajectory solution(int k, double h) {
    static specfun::EigenTable t = specfun::build_eigen_table(1.0, 3);
    shooting::TraceControls ctl;
    ode::RadialTrajectory traj;
    const double c = t.mu_k(k) / 2.0;
    const double w = 0.35 * c;
    shooting::solve_lambda(k, h, c - w, c + w, 1.0, ctl, &traj);
    return traj;
}

/// Negative control: same nodes/crits, but w and dw doubled, so the energy
/// relations and envelopes no longer describe a solution.
ode::RadialTrajectory scaled_by(const ode::RadialTrajectory& src, double factor) {
    ode::RadialTrajectory t = src;
    for (auto& v : t.w) v *= factor;
    for (auto& v : t.dw) v *= factor;
    for (auto& s : t.steps)
        for (int c = 0; c < 2; ++c) {
            s.c1[c] *= factor;
            s.c2[c] *= factor;
            s.c3[c] *= factor;
            s.c4[c] *= factor;
            s.c5[c] *= factor;
        }
    t.launch_a *= factor;
    t.launch_b *= factor;
    t.h *= factor;
    t.residual *= factor;
    for (auto& s : t.segments) {
        s.w_r1 *= factor;
        s.w_r2 *= factor;
        s.dw_r1 *= factor;
        s.dw_r2 *= factor;
    }
    return t;
}

}  // namespace

TEST_CASE("logarithm inequality: limits, a worked value, a property sweep") {
    auto [lo, hi] = check_log_inequality(1.0, std::exp(1.0));
    CHECK(1.0 - (std::exp(1.0) - 1.0) / std::exp(1.0) == doctest::Approx(lo).epsilon(1e-12));
    CHECK(std::exp(1.0) - 1.0 - 1.0 == doctest::Approx(hi).epsilon(1e-12));
    // equality in the a -> b limit
    auto [l2, h2] = check_log_inequality(1.0 - 1e-9, 1.0);
    CHECK(std::fabs(l2) < 1e-12);
    CHECK(std::fabs(h2) < 1e-12);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unif(1e-6, 50.0);
    for (int i = 0; i < 100000; ++i) {
        double a = unif(rng), b = unif(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        auto [ml, mh] = check_log_inequality(a, b);
        CHECK(ml >= 0.0);
        CHECK(mh >= 0.0);
    }
    CHECK_THROWS_AS(check_log_inequality(2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(check_log_inequality(0.0, 1.0), std::domain_error);
}

TEST_CASE("sandwich envelopes hold on a k = 1 solution at moderate amplitude") {
    const auto traj = solution(1, 0.4);
    REQUIRE(traj.fully_classified);
    for (const auto& seg : traj.segments) {
        const SegmentCheck sc = check_sandwich(traj, seg, 50);
        CHECK(sc.pass);
        for (const auto& c : sc.checks) CHECK(c.margin >= -1e-7 * c.scale);
    }
}

TEST_CASE("interval and derivative chains hold per case") {
    const auto traj = solution(2, 0.3);
    REQUIRE(traj.fully_classified);
    REQUIRE(traj.segments.size() == 4);
    bool seen[4] = {false, false, false, false};
    for (const auto& seg : traj.segments) {
        seen[static_cast<int>(seg.kind)] = true;
        const SegmentCheck sc = check_interval_and_derivative(traj, seg);
        CHECK(sc.pass);
    }
    CHECK(seen[0]);
    CHECK(seen[1]);
    CHECK(seen[2]);
    CHECK(seen[3]);
}

TEST_CASE("mixed eigenvalue reproduces the full-disk table value") {
    static specfun::EigenTable t = specfun::build_eigen_table(1.0, 1);
    const double m = mixed_eigenvalue(0.0, 1.0, MixedBc::neumann_dirichlet);
    CHECK(m == doctest::Approx(t.nu_k(1)).epsilon(1e-8));
}

TEST_CASE("mixed eigenvalue scaling and length monotonicity") {
    const double base = mixed_eigenvalue(0.2, 0.7, MixedBc::dirichlet_neumann);
    const double scaled = mixed_eigenvalue(0.4, 1.4, MixedBc::dirichlet_neumann);
    CHECK(scaled == doctest::Approx(base / 4.0).epsilon(1e-8));
    double prev = 1e300;
    for (double len : {0.3, 0.5, 0.7}) {
        const double m = mixed_eigenvalue(0.2, 0.2 + len, MixedBc::neumann_dirichlet);
        CHECK(m < prev);
        prev = m;
    }
    CHECK_THROWS_AS(mixed_eigenvalue(0.0, 1.0, MixedBc::dirichlet_neumann),
                    std::invalid_argument);
    CHECK_THROWS_AS(mixed_eigenvalue(0.5, 0.5, MixedBc::neumann_dirichlet),
                    std::invalid_argument);
}

TEST_CASE("lambda bounds on traced points, nested global interval") {
    const LambdaBounds global = lambda_interval(1.0, 1);
    CHECK(global.lo > 0.0);
    CHECK(global.hi > global.lo);
    const auto traj = solution(1, 0.5);
    const LambdaBoundReport rep = check_lambda_bounds(traj, &global);
    CHECK(rep.pass);
    // the global lower bound nests under every positive segment's mu/2
    for (const auto& seg : traj.segments) {
        const bool ac = seg.kind == ode::SegmentCase::A || seg.kind == ode::SegmentCase::C;
        const double mu = mixed_eigenvalue(
            seg.r1, seg.r2, ac ? MixedBc::neumann_dirichlet : MixedBc::dirichlet_neumann);
        if (seg.turning() > 0.0) CHECK(global.lo <= 0.5 * mu + 1e-9);
    }
}

TEST_CASE("full point verification passes on solutions, fails the scaled control") {
    const LambdaBounds global = lambda_interval(1.0, 1);
    const auto traj = solution(1, 0.4);
    const PointReport good = verify_point(traj, &global, 1e-7, 40);
    CHECK(good.pass);
    CHECK(good.worst_margin >= -1e-7);

    const auto bad_traj = scaled_by(traj, 2.0);
    const PointReport bad = verify_point(bad_traj, &global, 1e-7, 40);
    CHECK_FALSE(bad.pass);
}
