#ifndef SINGBIF_RADIAL_ODE_HPP
#define SINGBIF_RADIAL_ODE_HPP

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace singbif::ode {

/// Nonlinearity of the radial equation: f_lambda(w) = -lambda w - lambda w / (1 + sqrt(lambda) w).
/// Throws std::domain_error if 1 + sqrt(lambda) w <= 0 (the singular barrier).
double f_lambda(double lambda, double w);
double f_lambda_prime(double lambda, double w);

/// Primitive of f_lambda: F_lambda(s) = ln(1 + sqrt(lambda) s) - sqrt(lambda) s - (lambda/2) s^2.
/// <= 0 everywhere on the admissible interval, = 0 iff s = 0.
double F_lambda(double lambda, double s);

/// Ancestor nonlinearity h_lambda(s) = lambda sqrt(lambda) s^2 / (1 + sqrt(lambda) s),
/// used by the change-of-variables identity f_lambda(w) = -2 lambda w + h_lambda(w).
double h_ancestor(double lambda, double s);

enum class SegmentCase { A, B, C, D };

/// One monotone piece between consecutive node/critical events.
struct Segment {
    double r1 = 0.0, r2 = 0.0;
    SegmentCase kind = SegmentCase::A;
    double w_r1 = 0.0, w_r2 = 0.0;
    double dw_r1 = 0.0, dw_r2 = 0.0;
    /// Turning value h = w at the critical end (r1 for A/C, r2 for B/D).
    double turning() const {
        return (kind == SegmentCase::A || kind == SegmentCase::C) ? w_r1 : w_r2;
    }
    double crit_rho() const {
        return (kind == SegmentCase::A || kind == SegmentCase::C) ? r1 : r2;
    }
    double node_rho() const {
        return (kind == SegmentCase::A || kind == SegmentCase::C) ? r2 : r1;
    }
};

/// Raised when the integration reaches the singular barrier 1 + sqrt(lambda) w
/// < barrier_floor. The radius reached is diagnostic data, not a defect.
struct BarrierHit : std::runtime_error {
    double rho_reached;
    explicit BarrierHit(double rho)
        : std::runtime_error("barrier reached at rho = " + std::to_string(rho)),
          rho_reached(rho) {}
};

struct IntegrateOptions {
    double tol = 1e-10;            // local error control (abs and rel)
    double barrier_floor = 1e-9;   // stop when 1 + sqrt(lambda) w falls below
    double launch_fraction = 1e-4; // series launch extent as a fraction of R
};

/// Dense-output coefficients of one accepted step (per state component).
struct DenseStep {
    double rho0 = 0.0, h = 0.0;
    std::array<double, 2> c1{}, c2{}, c3{}, c4{}, c5{};
};

struct RadialTrajectory {
    double lambda = 0.0;  // parameter of the right-hand side
    double h = 0.0;       // initial amplitude w(rho_start)
    double radius = 0.0;  // final radius
    double rho_start = 0.0;

    std::vector<double> grid, w, dw;  // accepted step endpoints
    std::vector<DenseStep> steps;
    double launch_a = 0.0, launch_b = 0.0, launch_rho = 0.0;  // series launch

    std::vector<double> nodes;  // w = 0, ascending, interior
    std::vector<double> crits;  // dw = 0, ascending, interior
    std::vector<Segment> segments;
    bool fully_classified = false;

    double barrier_min = 0.0;  // min of 1 + sqrt(lambda) w (lambda > 0 runs)
    double residual = 0.0;     // dw at the final radius

    double w_at(double rho) const;
    double dw_at(double rho) const;
    double sup_w() const;
    double inf_w() const;
    int node_count() const { return static_cast<int>(nodes.size()); }
};

/// Right-hand side bundle for the generic radial IVP
/// w'' + w'/rho = f(w), started either at rho = 0 (series launch, dw0 = 0
/// required) or at rho_start > 0 with arbitrary (w0, dw0).
struct RadialRhs {
    std::function<double(double)> f;
    std::function<double(double)> fprime;
    /// Optional barrier gap g(w); integration stops with BarrierHit when it
    /// falls below opts.barrier_floor. Empty = no barrier.
    std::function<double(double)> gap;
};

RadialTrajectory integrate_ivp(const RadialRhs& rhs, double w0, double dw0,
                               double rho_start, double radius,
                               const IntegrateOptions& opts);

/// The radial problem's own integrator: w(0) = h, dw(0) = 0, barrier-aware.
RadialTrajectory integrate(double lambda, double h, double radius,
                           const IntegrateOptions& opts = {});

/// | rho2^2 p(rho2) - rho1^2 p(rho1) - (2 rho2^2 F(w2) - 2 rho1^2 F(w1)
///   - int_{rho1}^{rho2} 4 s F(w(s)) ds) | with p = dw^2, evaluated on the
/// trajectory's dense output.
double energy_residual(const RadialTrajectory& traj, double rho1, double rho2,
                       double quad_tol = 1e-12);

}  // namespace singbif::ode

#endif
