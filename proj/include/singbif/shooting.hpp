#ifndef SINGBIF_SHOOTING_HPP
#define SINGBIF_SHOOTING_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "singbif/radial_ode.hpp"

namespace singbif::shooting {

struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NodalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Neumann shooting residual dw(R) at fixed (lambda, h); a barrier approach is
/// reported as a tagged outcome rather than a failure.
struct ShotOutcome {
    bool barrier_hit = false;
    double rho_reached = 0.0;  // radius reached when barrier_hit
    double residual = 0.0;     // dw(R) when completed
    int nodes = -1;
};
ShotOutcome shoot_residual(double lambda, double h, double radius,
                           const ode::IntegrateOptions& opts = {});

struct BranchPoint {
    double lambda = 0.0;
    double h = 0.0;
    int k = 0;
    double sup_w = 0.0, inf_w = 0.0;
    double barrier_gap = 0.0;  // min of 1 + sqrt(lambda) w along the solution
    std::vector<double> nodes;
    int trajectory_ref = -1;  // index into Branch::trajectories, -1 if dropped
};

struct Branch {
    int k = 0;
    int sign = +1;
    std::vector<BranchPoint> points;          // ordered by increasing |h|
    std::vector<ode::RadialTrajectory> trajectories;
    double origin_lambda = 0.0;               // extrapolated lambda as h -> 0
    double asymptote_lambda = 0.0;            // tail intercept (sign + only)
    std::string termination;                  // amplitude cap | barrier floor | step failure
};

struct TraceControls {
    double h_min = 1e-4;
    double h_max = 50.0;
    double step_ratio = 1.35;
    double shoot_tol = 1e-9;
    int max_points = 400;
    bool keep_trajectories = true;
    ode::IntegrateOptions ode;
};

/// Solve dw(R) = 0 in lambda at fixed amplitude, inside a sign-change bracket
/// with node count k at both ends. |residual| <= ctl.shoot_tol on return.
BranchPoint solve_lambda(int k, double h, double lam_lo, double lam_hi, double radius,
                         const TraceControls& ctl,
                         ode::RadialTrajectory* out_traj = nullptr);

Branch trace_branch(int k, int sign, double radius, const TraceControls& ctl = {});

/// Blow-up indicators along a branch and their pairwise Kendall concordance.
/// Indicators are oriented so that all increase together along a blow-up:
/// sup w, 1/inf(1+sqrt(lambda) w), min-even-hump sup, 1/max-odd-hump gap,
/// 1/max-odd-interval length.
struct BlowupReport {
    std::vector<double> sup_w, inf_gap, even_min_sup, odd_max_gap, odd_max_len;
    std::vector<std::vector<double>> tau;  // 5x5 pairwise Kendall tau
    double tau_min = 0.0;
    bool concordant = false;  // all pairwise tau > 0.9
};
BlowupReport blowup_diagnostics(const Branch& branch);

struct DirichletScanParams {
    double lambda_min = 1.0, lambda_max = 30.0;
    int n_lambda = 200;
    std::optional<double> h_min;  // default: -0.9 / sqrt(lambda), per row
    double h_max = 20.0;
    int n_h = 200;
    double radius = 1.0;
    double tol = 1e-8;
};

struct DirichletScanReport {
    DirichletScanParams params;
    int completed = 0, barrier_hits = 0, skipped_trivial = 0, errors = 0;
    /// Dirichlet residual: the boundary gap 1 + sqrt(lambda) w(R) (= sqrt(lambda)
    /// times the original unknown at R). A solution cell would need it to
    /// vanish or change sign among admissible corners.
    double min_residual = 0.0;
    double argmin_lambda = 0.0, argmin_h = 0.0;
    double min_abs_w_end = 0.0;  // min |w(R)| over admissible samples
    int solution_cells = 0;
};
DirichletScanReport dirichlet_scan(const DirichletScanParams& params);

/// Number of traced branches whose realized lambda-interval contains lambda.
int multiplicity_count(const std::vector<Branch>& branches, double lambda);

}  // namespace singbif::shooting

#endif
