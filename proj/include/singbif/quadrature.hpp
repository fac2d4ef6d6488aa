#ifndef SINGBIF_QUADRATURE_HPP
#define SINGBIF_QUADRATURE_HPP

#include <functional>

namespace singbif {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
    int panels = 0;
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b].
/// Subdivides until the summed error estimate is below
/// max(abs_tol, rel_tol * |integral|).
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12, double abs_tol = 1e-300,
                        int max_depth = 30);

/// Single non-adaptive K15 panel on [a,b] (value only).
double gk15_panel(const std::function<double(double)>& f, double a, double b);

}  // namespace singbif

#endif
