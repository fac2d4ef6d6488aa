#ifndef SINGBIF_SPECFUN_HPP
#define SINGBIF_SPECFUN_HPP

#include <vector>

namespace singbif::specfun {

/// Bessel function of the first kind, order 0. Compensated power series for
/// |x| < 16, Hankel asymptotic expansion beyond; absolute accuracy well below
/// 1e-13 on |x| <= 200. Throws std::domain_error on non-finite input.
double bessel_j0(double x);

/// Bessel function of the first kind, order 1.
double bessel_j1(double x);

/// d/dx J0(x) = -J1(x).
double bessel_j0_prime(double x);

/// First kmax zeros of J0 (ascending).
std::vector<double> j0_zeros(int kmax);

/// First kmax nontrivial zeros of J0' (= zeros of J1 excluding x=0).
std::vector<double> j0_prime_zeros(int kmax);

enum class EigenKind { neumann, dirichlet };

/// Radial eigenvalue tables for the disk of radius R:
/// mu_k = (y_k/R)^2 with y_k the k-th nontrivial zero of J0' (Neumann),
/// nu_k = (z_k/R)^2 with z_k the k-th zero of J0 (Dirichlet).
/// Indices are 1-based; the trivial Neumann mode (mu_0 = 0, constant
/// eigenfunction) is kept out of the stored sequences.
struct EigenTable {
    double radius = 1.0;
    std::vector<double> y;   // J0' zeros
    std::vector<double> z;   // J0 zeros
    std::vector<double> mu;  // Neumann eigenvalues
    std::vector<double> nu;  // Dirichlet eigenvalues
    int kmax = 0;

    double mu_k(int k) const;  // 1-based
    double nu_k(int k) const;

    /// w_k(rho) = J0(y_k rho / R) or v_k(rho) = J0(z_k rho / R).
    double eigenfunction(EigenKind kind, int k, double rho) const;
};

EigenTable build_eigen_table(double radius, int kmax);

}  // namespace singbif::specfun

#endif
