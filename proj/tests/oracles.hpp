// Independent oracles used by the test suites. These deliberately avoid the
// library's own evaluation paths: plain-double truncated series, bisection,
// midpoint quadrature, finite differences.
#ifndef SINGBIF_TESTS_ORACLES_HPP
#define SINGBIF_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

/// 30-term Maclaurin series for J0; adequate for |x| <= 6 in plain doubles.
inline double j0_series30(double x) {
    const double q = x * x / 4.0;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m <= 30; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += (m % 2 == 1) ? -term : term;
    }
    return sum;
}

/// 30-term series for J1.
inline double j1_series30(double x) {
    const double q = x * x / 4.0;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m <= 30; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1));
        sum += (m % 2 == 1) ? -term : term;
    }
    return 0.5 * x * sum;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    if (flo * f(hi) > 0.0) throw std::runtime_error("oracle bisect: no sign change");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm * flo < 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Brute-force midpoint evaluation of the time map
///   int_0^s dxi / sqrt(2 (F_lambda(xi) - F_lambda(h)))
/// in the de-singularized variable xi = h - sign(h) t^2.
inline double phi_midpoint(double lambda, double h, double s, long panels = 1000000) {
    const double sql = std::sqrt(lambda);
    const auto F = [sql](double v) {
        const double u = sql * v;
        return std::log1p(u) - u - 0.5 * u * u;
    };
    const double Fh = F(h);
    const double sgn = h > 0.0 ? 1.0 : -1.0;
    const double ta = std::sqrt(std::fabs(h) - std::fabs(s));
    const double tb = std::sqrt(std::fabs(h));
    const double dt = (tb - ta) / static_cast<double>(panels);
    double acc = 0.0;
    for (long i = 0; i < panels; ++i) {
        const double t = ta + (static_cast<double>(i) + 0.5) * dt;
        const double xi = sgn * (std::fabs(h) - t * t);
        acc += 2.0 * t / std::sqrt(2.0 * (F(xi) - Fh));
    }
    return sgn * acc * dt;
}

/// Centered finite difference.
inline double fd_derivative(const std::function<double(double)>& f, double x,
                            double eps = 1e-6) {
    return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

}  // namespace oracles

#endif
