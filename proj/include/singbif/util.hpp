#ifndef SINGBIF_UTIL_HPP
#define SINGBIF_UTIL_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace singbif {

/// Kendall rank-correlation coefficient (tau-a) of two equally long series.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

/// Worker cap: SINGBIF_THREADS if set, else hardware concurrency (>= 1).
int worker_cap();

/// Run fn(i) for i in [0, n), on up to min(worker_cap, n) threads.
/// Results must be written to pre-sized per-index slots by the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::vector<double> linspace(double a, double b, int n);

/// Neville extrapolation to 0 of a sequence sampled at x_j = x0 * q^j
/// (0 < q < 1), assuming an expansion c0 + c1 x + c2 x^2 + ...
double richardson_extrapolate(const std::vector<double>& values, double q);

/// Least-squares fit y = sum_j c_j x^j, returns coefficients c (degree+1).
std::vector<double> polyfit(const std::vector<double>& x,
                            const std::vector<double>& y, int degree);

}  // namespace singbif

#endif
