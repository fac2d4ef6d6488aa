#ifndef SINGBIF_TIMEMAP_HPP
#define SINGBIF_TIMEMAP_HPP

namespace singbif::timemap {

/// Time-map evaluation. `value` is
///   Phi_{lambda,h}(s) = int_0^s dxi / sqrt(2 (F_lambda(xi) - F_lambda(h))),
/// the normalization whose turning-point limits are pi/(2 sqrt(2 lambda))
/// (h -> 0+), pi/(2 sqrt(lambda)) (h -> +inf), the negatives mirrored, and 0
/// at the barrier. The section-4 inequality chains use the unnormalized
/// integral, which is sqrt(2) * value.
struct PhiEval {
    double lambda = 0.0;
    double h = 0.0;      // turning value (h > 0, or -1/sqrt(lambda) < h < 0)
    double s = 0.0;      // evaluation point between 0 and h
    double value = 0.0;
    double err_est = 0.0;
};

PhiEval phi(double lambda, double h, double s, double rel_tol = 1e-12);
PhiEval phi_at_turning(double lambda, double h, double rel_tol = 1e-12);
double phi_value(double lambda, double h, double s, double rel_tol = 1e-12);

/// Turning-point value parameterized by the barrier gap e = 1 + sqrt(lambda) h
/// (h < 0 side). Allows e far below double resolution of h itself.
double phi_turning_from_gap(double lambda, double gap, double rel_tol = 1e-12);

/// s with Phi_{lambda,h}(s) = target, by monotone bisection + Newton polish.
double phi_inverse(double lambda, double h, double target, double tol = 1e-9);

struct PhiLimits {
    double zero_plus;    // pi / (2 sqrt(2 lambda))
    double infinity;     // pi / (2 sqrt(lambda))
    double zero_minus;   // -pi / (2 sqrt(2 lambda))
    double barrier;      // 0
};
PhiLimits phi_limits(double lambda);

/// Numerically extrapolated counterparts of the four limits (Richardson along
/// a geometric h-sequence for the h->0 pair, a single far evaluation for
/// h->inf, a polynomial fit in 1/sqrt(|F|) along a geometric gap-sequence for
/// the barrier limit).
struct LimitProbes {
    PhiLimits analytic;
    double zero_plus, infinity, zero_minus, barrier;
};
LimitProbes extrapolate_limits(double lambda);

}  // namespace singbif::timemap

#endif
