#ifndef SINGBIF_SANDBOX_HPP
#define SINGBIF_SANDBOX_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace singbif::sandbox {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    explicit operator bool() const { return static_cast<bool>(value); }
};

/// Finite-dimensional instance of the two-branch bifurcation setting, in
/// coordinates orthonormal for the weak inner product: K is the operator's
/// coordinate matrix (<Au,v> = u^T K v), W the Gram matrix of the strong
/// inner product, H and H1 the higher-order potentials (empty = 0).
struct SandboxModel {
    std::string name;
    int n = 0;
    Mat K, W;
    ScalarField H, H1;
    double lambda_hat = 0.0;
    double delta = 0.125;
    double eps0 = 0.0;
    double nu = 1.0, m_coerc = 0.0;  // <Au,u> >= nu |u|_W^2 - m |u|^2
    /// Scales at which the multiplier convergence is probed; chosen per model
    /// so the largest scale still sits in the asymptotic regime.
    std::vector<double> default_sweep{0.2, 0.1, 0.05, 0.02};

    // derived spectral data
    Vec evals;
    Mat evecs;  // columns orthonormal
    std::vector<int> idx1, idx2, idx3;
    double lambda_below = 0.0;  // largest eigenvalue < lambda_hat
    double lambda_above = 0.0;  // smallest eigenvalue > lambda_hat
    Mat P2, P13;                // orthogonal projections

    Vec pi2(const Vec& u) const { return P2 * u; }
    Vec pi13(const Vec& u) const { return P13 * u; }
    double h_norm(const Vec& u) const { return std::sqrt(u.dot(W * u)); }
};

/// Populates spectral data and validates the parameter regime
/// (5 eps0 < min gap, delta^2 (lhat - below) <= eps0, delta <= 1/8).
void finalize_model(SandboxModel& model);

SandboxModel make_default_model();

/// 5-mode radial Neumann truncation of the transformed disk problem at the
/// first nontrivial eigenvalue; the potential carries the cutoff nonlinearity.
SandboxModel make_galerkin_model(double radius = 1.0, int modes = 5);

struct Functionals {
    double f = 0.0, g = 0.0;
    Vec grad_f, grad_g;
};
/// f_rho(u) = 1/2 u^T K u + H(rho u)/rho^2 and g_rho likewise with the weak
/// norm; rho = 0 returns the quadratic parts.
Functionals scaled_functionals(const SandboxModel& model, double rho, const Vec& u);

struct Projection {
    double t_bar = 1.0;
    Vec point;
};
/// Radial-in-the-collar projection onto {g_rho = 1}: solves
/// g_rho(delta o + t (u - delta o)) = 1 for t in [1/2, 2], o the normalized
/// degenerate-space component. Throws std::runtime_error when rho is outside
/// the contraction regime.
Projection sphere_project(const SandboxModel& model, double rho, const Vec& u);

struct CriticalPair {
    Vec u;
    double lambda = 0.0;  // constraint multiplier
    double mu = 0.0;      // collar multiplier (0 for interior points)
    double f_val = 0.0;
    double rho = 0.0;
    double kkt_residual = 0.0;
};

std::pair<CriticalPair, CriticalPair> find_critical_pairs(const SandboxModel& model,
                                                          double rho);

/// True iff the point sits strictly inside the collar with vanishing collar
/// multiplier.
bool boundary_exclusion_check(const SandboxModel& model, double rho,
                              const CriticalPair& pair);

/// sup/inf of f_rho over the four subspace-constraint intersections.
struct LevelBounds {
    double a_prime = 0.0;   // sup over (X1+X2) with |pi2 u| = delta
    double a_dprime = 0.0;  // inf over (X2+X3), collar interior allowed
    double b_prime = 0.0;   // sup over (X1+X2), collar interior allowed
    double b_dprime = 0.0;  // inf over (X2+X3) with |pi2 u| = delta
};
LevelBounds level_bounds(const SandboxModel& model, double rho);

/// Closed forms at rho = 0 for the boundary pair.
std::pair<double, double> level_bounds_quadratic(const SandboxModel& model);

/// C1 = H_rho(u) - <grad H_rho(u), u>/2 and
/// C2 = <grad H1_rho(u), u>/2 - H1_rho(u).
std::pair<double, double> correction_terms(const SandboxModel& model, double rho,
                                           const Vec& u);

/// Largest candidate rho at which the projection regime holds on a
/// deterministic sample of the collar.
double largest_regime_rho(const SandboxModel& model,
                          const std::vector<double>& candidates);

struct SweepEntry {
    double rho = 0.0;
    CriticalPair first, second;
    LevelBounds bounds;
    bool exclusion_first = false, exclusion_second = false;
    double c1_first = 0.0, c2_first = 0.0, c1_second = 0.0, c2_second = 0.0;
};

struct SweepReport {
    std::string model;
    double lambda_hat = 0.0;
    std::vector<SweepEntry> entries;
    double a_prime0_closed = 0.0, b_dprime0_closed = 0.0;
    double a_prime0_optimized = 0.0, b_dprime0_optimized = 0.0;
    double largest_regime_rho = 0.0;
};
SweepReport run_sweep(const SandboxModel& model, const std::vector<double>& rhos);

}  // namespace singbif::sandbox

#endif
