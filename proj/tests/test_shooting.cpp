#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "singbif/shooting.hpp"
#include "singbif/specfun.hpp"

using namespace singbif;
using namespace singbif::shooting;

namespace {
const specfun::EigenTable& table() {
    static specfun::EigenTable t = specfun::build_eigen_table(1.0, 4);
    return t;
}
}  // namespace

TEST_CASE("residual linearization at the bifurcation point") {
    const double mu1 = table().mu_k(1);
    const double h = 1e-8;
    // at lambda = mu1/2 the linearized residual h sqrt(2l) J0'(sqrt(2l) R) vanishes
    const ShotOutcome at = shoot_residual(mu1 / 2.0, h, 1.0);
    REQUIRE_FALSE(at.barrier_hit);
    CHECK(std::fabs(at.residual) <= 1e-6 * std::fabs(h) * std::sqrt(2.0 * mu1 / 2.0));
    // strictly between mu1/2 and mu2/2 the residual carries the sign of
    // h J0'(sqrt(2 lambda) R)
    for (double lambda : {0.6 * mu1, 0.9 * table().mu_k(2) / 2.0}) {
        const ShotOutcome s = shoot_residual(lambda, h, 1.0);
        REQUIRE_FALSE(s.barrier_hit);
        const double lin =
            h * std::sqrt(2.0 * lambda) *
            specfun::bessel_j0_prime(std::sqrt(2.0 * lambda));
        CHECK(s.residual * lin > 0.0);
    }
}

TEST_CASE("residual is continuous in h on a barrier-free grid") {
    double prev = 0.0;
    bool first = true;
    for (double h = 0.05; h <= 0.5; h += 0.05) {
        const ShotOutcome s = shoot_residual(6.0, h, 1.0);
        REQUIRE_FALSE(s.barrier_hit);
        if (!first) CHECK(std::fabs(s.residual - prev) < 0.6);
        prev = s.residual;
        first = false;
    }
}

TEST_CASE("solve_lambda converges linearly toward the onset as h shrinks") {
    const double target = table().mu_k(1) / 2.0;
    TraceControls ctl;
    double prev_err = 1e9;
    double ratio_ref = 0.0;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const BranchPoint pt =
            solve_lambda(1, h, target - 0.6, target + 0.6, 1.0, ctl);
        CHECK(pt.k == 1);
        const double err = std::fabs(pt.lambda - target);
        CHECK(err < prev_err);  // error decreases with amplitude
        prev_err = err;
        if (ratio_ref == 0.0) ratio_ref = err / h;
        else  // linear rate: err/h is roughly amplitude-independent
            CHECK(err / h == doctest::Approx(ratio_ref).epsilon(0.1));
    }
    CHECK(prev_err < 1e-3);  // at h = 1e-4 the onset is resolved to 1e-3
}

TEST_CASE("solve_lambda error contracts") {
    TraceControls ctl;
    const double c = table().mu_k(1) / 2.0;
    CHECK_THROWS_AS(solve_lambda(1, 0.01, c + 0.2, c + 0.4, 1.0, ctl), BracketError);
    CHECK_THROWS_AS(solve_lambda(2, 0.01, c - 0.5, c + 0.5, 1.0, ctl), NodalError);
}

TEST_CASE("re-solving with a tighter tolerance barely moves lambda") {
    TraceControls loose, tight;
    loose.shoot_tol = 1e-9;
    tight.shoot_tol = 1e-10;
    tight.ode.tol = loose.ode.tol;
    const double c = table().mu_k(1) / 2.0;
    const BranchPoint a = solve_lambda(1, 0.01, c - 0.5, c + 0.5, 1.0, loose);
    const BranchPoint b = solve_lambda(1, 0.01, c - 0.5, c + 0.5, 1.0, tight);
    CHECK(std::fabs(a.lambda - b.lambda) <= 1e-8);
}

TEST_CASE("k = 1 branch: origin, positivity, nodal constancy") {
    TraceControls ctl;
    ctl.h_max = 5.0;
    const Branch br = trace_branch(1, +1, 1.0, ctl);
    REQUIRE(br.points.size() >= 10);
    CHECK(br.origin_lambda == doctest::Approx(table().mu_k(1) / 2.0).epsilon(1e-4));
    for (const BranchPoint& p : br.points) {
        CHECK(p.lambda > 0.0);
        CHECK(p.k == 1);
        CHECK(p.barrier_gap > 0.0);
        // even-interval floor
        REQUIRE(p.nodes.size() == 1);
        CHECK(p.nodes[0] >= M_PI / (4.0 * std::sqrt(p.lambda)) - 1e-8);
    }
    // points ordered by increasing amplitude
    for (std::size_t i = 1; i < br.points.size(); ++i)
        CHECK(std::fabs(br.points[i].h) > std::fabs(br.points[i - 1].h));
}

TEST_CASE("negative branch terminates at the barrier without an asymptote claim") {
    TraceControls ctl;
    ctl.h_min = 1e-3;
    const Branch br = trace_branch(1, -1, 1.0, ctl);
    REQUIRE(br.points.size() >= 5);
    CHECK(br.origin_lambda == doctest::Approx(table().mu_k(1) / 2.0).epsilon(1e-3));
    for (const BranchPoint& p : br.points) {
        CHECK(p.h < 0.0);
        CHECK(p.k == 1);
    }
    CHECK(br.termination == "barrier floor");
    CHECK(std::isnan(br.asymptote_lambda));
}

TEST_CASE("blow-up diagnostics concord on a k = 1 branch") {
    TraceControls ctl;
    ctl.h_min = 0.05;
    ctl.h_max = 30.0;
    ctl.step_ratio = 1.6;
    const Branch br = trace_branch(1, +1, 1.0, ctl);
    REQUIRE(br.points.size() >= 5);
    const BlowupReport rep = blowup_diagnostics(br);
    CHECK(rep.tau_min > 0.9);
    CHECK(rep.concordant);
    // sup diverges while the odd interval collapses
    CHECK(rep.sup_w.back() > rep.sup_w.front());
    CHECK(rep.odd_max_len.back() < rep.odd_max_len.front());
    CHECK(rep.inf_gap.back() < rep.inf_gap.front());
}

TEST_CASE("blow-up diagnostics refuse a truncated branch") {
    TraceControls ctl;
    ctl.h_max = 2e-4;
    const Branch br = trace_branch(1, +1, 1.0, ctl);
    REQUIRE(br.points.size() < 5);
    CHECK_THROWS_AS(blowup_diagnostics(br), std::invalid_argument);
}

TEST_CASE("dirichlet scan: no admissible boundary zeros, trivial row excluded") {
    DirichletScanParams p;
    p.lambda_min = 2.0;
    p.lambda_max = 16.0;
    p.n_lambda = 40;
    p.h_max = 6.0;
    p.n_h = 26;  // step 0.25, so h = 0 sits on the grid
    p.h_min = -0.25;
    const DirichletScanReport rep = dirichlet_scan(p);
    CHECK(rep.solution_cells == 0);
    CHECK(rep.skipped_trivial >= 40);  // one h = 0 sample per lambda row
    CHECK(rep.completed > 0);
    CHECK(rep.min_residual > 0.0);
    // refinement stability
    DirichletScanParams p2 = p;
    p2.n_lambda = 80;
    p2.n_h = 81;
    CHECK(dirichlet_scan(p2).solution_cells == 0);
}

TEST_CASE("multiplicity counting over traced branches") {
    TraceControls ctl;
    ctl.h_max = 20.0;
    std::vector<Branch> branches;
    branches.push_back(trace_branch(1, +1, 1.0, ctl));
    const double nu1 = table().nu_k(1), mu1 = table().mu_k(1);
    // between nu_1 and mu_1/2 the k=1 branch must be crossed
    CHECK(multiplicity_count(branches, 0.5 * (nu1 + mu1 / 2.0)) >= 1);
    // below every branch lambda there is nothing
    CHECK(multiplicity_count(branches, 0.1) == 0);
    // adding branches can only increase the count
    branches.push_back(trace_branch(2, +1, 1.0, ctl));
    CHECK(multiplicity_count(branches, 0.5 * (nu1 + mu1 / 2.0)) >=
          multiplicity_count({branches[0]}, 0.5 * (nu1 + mu1 / 2.0)));
}
