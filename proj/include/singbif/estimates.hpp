#ifndef SINGBIF_ESTIMATES_HPP
#define SINGBIF_ESTIMATES_HPP

#include <string>
#include <utility>
#include <vector>

#include "singbif/radial_ode.hpp"

namespace singbif::estimates {

struct CheckResult {
    std::string id;
    double lhs = 0.0, rhs = 0.0;  // the two sides compared (lhs <= rhs expected)
    double margin = 0.0;          // rhs - lhs, possibly the worst over samples
    double scale = 1.0;           // magnitude the slack is scaled by
    bool pass = false;
};

struct SegmentCheck {
    ode::SegmentCase kind = ode::SegmentCase::A;
    double r1 = 0.0, r2 = 0.0;
    double h = 0.0;  // turning value w(rho_bar)
    double tol = 1e-7;
    std::vector<CheckResult> checks;
    bool pass = false;
};

/// Margins of (b-a)/b <= ln(b/a) <= (b-a)/a; both nonnegative for 0 < a < b.
std::pair<double, double> check_log_inequality(double a, double b);

/// Pointwise two-sided envelope check on >= `samples` interior points plus the
/// integrated energy sandwich over the segment ends.
SegmentCheck check_sandwich(const ode::RadialTrajectory& traj, const ode::Segment& seg,
                            int samples = 50, double tol = 1e-7);

/// Interval-length chain and turning-derivative bounds for the segment's case.
SegmentCheck check_interval_and_derivative(const ode::RadialTrajectory& traj,
                                           const ode::Segment& seg, double tol = 1e-7);

enum class MixedBc { neumann_dirichlet, dirichlet_neumann };

/// First eigenvalue of -(rho w')' = mu rho w on ]r1,r2[ with the mixed
/// conditions, by linear shooting and bisection; the eigenfunction is
/// certified positive on the interior.
double mixed_eigenvalue(double r1, double r2, MixedBc bc, double rel_tol = 1e-12);

struct LambdaBounds {
    double lo = 0.0, hi = 0.0;
};

/// A-priori bounds common to every k-node solution on the disk of the given
/// radius (assembled from mixed eigenvalues of the full interval and of
/// length-R/(2k) subintervals).
LambdaBounds lambda_interval(double radius, int k);

struct LambdaBoundReport {
    std::vector<CheckResult> checks;  // per segment mu/2 <= lambda <= mu, plus global
    LambdaBounds global;
    bool pass = false;
};
LambdaBoundReport check_lambda_bounds(const ode::RadialTrajectory& traj,
                                      const LambdaBounds* global = nullptr,
                                      double tol = 1e-7);

struct PointReport {
    std::vector<SegmentCheck> segments;
    std::vector<CheckResult> extra;  // even-interval, first-node, energy identity
    LambdaBoundReport lambda_bounds;
    double worst_margin = 0.0;
    bool pass = false;
};

/// The full inequality suite on one solution trajectory: per-segment sandwich,
/// interval/derivative chains, energy identity, even-interval lower bound,
/// first-node bound, and the lambda bounds.
PointReport verify_point(const ode::RadialTrajectory& traj,
                         const LambdaBounds* global = nullptr, double tol = 1e-7,
                         int samples = 50);

}  // namespace singbif::estimates

#endif
