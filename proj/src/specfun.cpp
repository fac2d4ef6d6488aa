#include "singbif/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace singbif::specfun {

namespace {

// --- compensated (double-double) arithmetic for the power series ---
// The alternating Maclaurin series loses ~I0(x)*eps in plain doubles, which
// is above the accuracy contract already at x ~ 9; carrying the terms and the
// accumulator in double-double keeps the series exact to ~1e-25 up to x = 16.

struct dd {
    double hi = 0.0, lo = 0.0;
};

inline dd two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd quick_two_sum(double a, double b) {  // requires |a| >= |b|
    const double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_div_d(dd a, double b) {
    const double q1 = a.hi / b;
    const dd p = two_prod(q1, b);
    const double e = ((a.hi - p.hi) - p.lo + a.lo) / b;
    return quick_two_sum(q1, e);
}

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

constexpr double kSeriesHankelSwitch = 16.0;

double j0_series(double x) {
    // J0(x) = sum_m (-1)^m (x^2/4)^m / (m!)^2
    const dd q = dd_div_d(two_prod(x, x), 4.0);
    dd term{1.0, 0.0};
    dd sum{1.0, 0.0};
    for (int m = 1; m < 300; ++m) {
        term = dd_div_d(dd_mul(term, q), static_cast<double>(m) * m);
        sum = dd_add(sum, (m & 1) ? dd_neg(term) : term);
        if (std::fabs(term.hi) < 1e-35) break;
    }
    return sum.hi + sum.lo;
}

double j1_series(double x) {
    // J1(x) = (x/2) sum_m (-1)^m (x^2/4)^m / (m! (m+1)!)
    const dd q = dd_div_d(two_prod(x, x), 4.0);
    dd term{1.0, 0.0};
    dd sum{1.0, 0.0};
    for (int m = 1; m < 300; ++m) {
        term = dd_div_d(dd_mul(term, q), static_cast<double>(m) * (m + 1));
        sum = dd_add(sum, (m & 1) ? dd_neg(term) : term);
        if (std::fabs(term.hi) < 1e-35) break;
    }
    const dd r = dd_mul(sum, two_prod(0.5, x));
    return r.hi + r.lo;
}

double j_hankel(int nu, double x) {
    // J_nu(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - (2nu+1)pi/4,
    // with the Hankel series P = sum (-1)^j u_{2j}, Q = sum (-1)^j u_{2j+1},
    // u_{k+1} = u_k (4 nu^2 - (2k+1)^2) / (8 x (k+1)). Truncated at the
    // smallest term; for x >= 16 the floor is below 2e-15.
    const double fournu2 = 4.0 * nu * nu;
    double u = 1.0;
    double p = 0.0, q = 0.0;
    double prev_mag = HUGE_VAL;
    for (int k = 0; k <= 40; ++k) {
        const double mag = std::fabs(u);
        if (mag > prev_mag) break;  // past the smallest term
        prev_mag = mag;
        const int phase = k % 4;
        if (phase == 0) p += u;
        else if (phase == 1) q += u;
        else if (phase == 2) p -= u;
        else q -= u;
        const double odd = 2.0 * k + 1.0;
        u *= (fournu2 - odd * odd) / (8.0 * x * (k + 1));
        if (mag < 1e-18) break;
    }
    const double chi = x - (2.0 * nu + 1.0) * 0.25 * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

void require_finite(double x, const char* who) {
    if (!std::isfinite(x))
        throw std::domain_error(std::string(who) + ": non-finite argument");
}

// Safeguarded Newton inside a sign-change bracket.
template <typename F, typename DF>
double refine_root(F f, DF df, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw std::runtime_error("refine_root: no sign change");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        if (fx == 0.0) break;
        if (fx * flo < 0.0) { hi = x; fhi = fx; }
        else { lo = x; flo = fx; }
        const double d = df(x);
        double xn = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-15 * std::max(1.0, std::fabs(x))) {
            x = xn;
            break;
        }
        x = xn;
    }
    return x;
}

}  // namespace

double bessel_j0(double x) {
    require_finite(x, "bessel_j0");
    x = std::fabs(x);
    return (x < kSeriesHankelSwitch) ? j0_series(x) : j_hankel(0, x);
}

double bessel_j1(double x) {
    require_finite(x, "bessel_j1");
    const double ax = std::fabs(x);
    const double v = (ax < kSeriesHankelSwitch) ? j1_series(ax) : j_hankel(1, ax);
    return x < 0 ? -v : v;
}

double bessel_j0_prime(double x) { return -bessel_j1(x); }

std::vector<double> j0_zeros(int kmax) {
    if (kmax < 1) throw std::invalid_argument("j0_zeros: kmax >= 1 required");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(kmax));
    for (int k = 1; k <= kmax; ++k) {
        // McMahon expansion as the initial guess; zeros are ~pi apart so a
        // +-0.5 bracket is safe once the guess is this good.
        const double b = (k - 0.25) * M_PI;
        const double g = b + 1.0 / (8.0 * b) - 124.0 / (3.0 * std::pow(8.0 * b, 3));
        double lo = g - 0.5, hi = g + 0.5;
        int widen = 0;
        while (bessel_j0(lo) * bessel_j0(hi) > 0.0) {
            lo -= 0.2;
            hi += 0.2;
            if (++widen > 8) throw std::runtime_error("j0_zeros: bracketing failure");
        }
        out.push_back(refine_root([](double t) { return bessel_j0(t); },
                                  [](double t) { return -bessel_j1(t); }, lo, hi));
    }
    return out;
}

std::vector<double> j0_prime_zeros(int kmax) {
    if (kmax < 1) throw std::invalid_argument("j0_prime_zeros: kmax >= 1 required");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(kmax));
    for (int k = 1; k <= kmax; ++k) {
        const double b = (k + 0.25) * M_PI;
        const double g = b - 3.0 / (8.0 * b) + 36.0 / (3.0 * std::pow(8.0 * b, 3));
        double lo = g - 0.5, hi = g + 0.5;
        int widen = 0;
        while (bessel_j1(lo) * bessel_j1(hi) > 0.0) {
            lo -= 0.2;
            hi += 0.2;
            if (++widen > 8)
                throw std::runtime_error("j0_prime_zeros: bracketing failure");
        }
        // J1'(x) = J0(x) - J1(x)/x
        out.push_back(refine_root(
            [](double t) { return bessel_j1(t); },
            [](double t) { return bessel_j0(t) - bessel_j1(t) / t; }, lo, hi));
    }
    return out;
}

double EigenTable::mu_k(int k) const {
    if (k < 1 || k > kmax) throw std::out_of_range("EigenTable::mu_k: index");
    return mu[static_cast<std::size_t>(k - 1)];
}

double EigenTable::nu_k(int k) const {
    if (k < 1 || k > kmax) throw std::out_of_range("EigenTable::nu_k: index");
    return nu[static_cast<std::size_t>(k - 1)];
}

double EigenTable::eigenfunction(EigenKind kind, int k, double rho) const {
    if (k < 1 || k > kmax) throw std::out_of_range("EigenTable::eigenfunction: index");
    if (!(rho >= 0.0 && rho <= radius))
        throw std::domain_error("EigenTable::eigenfunction: rho outside [0, R]");
    const double zero =
        (kind == EigenKind::neumann) ? y[static_cast<std::size_t>(k - 1)]
                                     : z[static_cast<std::size_t>(k - 1)];
    return bessel_j0(zero * rho / radius);
}

EigenTable build_eigen_table(double radius, int kmax) {
    if (!(radius > 0.0)) throw std::invalid_argument("build_eigen_table: R > 0 required");
    if (kmax < 1) throw std::invalid_argument("build_eigen_table: kmax >= 1 required");
    EigenTable t;
    t.radius = radius;
    t.kmax = kmax;
    t.y = j0_prime_zeros(kmax);
    t.z = j0_zeros(kmax);
    t.mu.reserve(static_cast<std::size_t>(kmax));
    t.nu.reserve(static_cast<std::size_t>(kmax));
    for (int k = 0; k < kmax; ++k) {
        const double yr = t.y[static_cast<std::size_t>(k)] / radius;
        const double zr = t.z[static_cast<std::size_t>(k)] / radius;
        t.mu.push_back(yr * yr);
        t.nu.push_back(zr * zr);
    }
    // interlacing nu_k < mu_k < nu_{k+1}
    for (int k = 0; k < kmax; ++k) {
        const bool left = t.nu[static_cast<std::size_t>(k)] < t.mu[static_cast<std::size_t>(k)];
        const bool right = (k + 1 >= kmax) ||
                           (t.mu[static_cast<std::size_t>(k)] < t.nu[static_cast<std::size_t>(k + 1)]);
        if (!(left && right))
            throw std::runtime_error("build_eigen_table: interlacing violated");
    }
    return t;
}

}  // namespace singbif::specfun
