#include "singbif/timemap.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "singbif/quadrature.hpp"
#include "singbif/util.hpp"

namespace singbif::timemap {

namespace {

// F(u_h + d) - F(u_h) for F(u) = ln(1+u) - u - u^2/2, written in terms of
// d and the gap e = 1 + u_h so that neither the barrier side (e -> 0) nor the
// small-amplitude side (u_h -> 0, where the plain difference cancels
// catastrophically) loses accuracy.
double f_gap(double d, double e) {
    const double r = d / e;
    if (std::fabs(r) < 0.25) {
        double sum = -d * (e * e - 1.0) / e - 0.5 * d * d * (1.0 + 1.0 / (e * e));
        double p = r * r;  // r^k / k terms from k = 3
        for (int k = 3; k < 60; ++k) {
            p *= r;
            const double term = ((k & 1) ? p : -p) / k;
            sum += term;
            if (std::fabs(term) < 1e-20 * (std::fabs(sum) + 1e-300)) break;
        }
        return sum;
    }
    return std::log1p(r) - d * (e + 0.5 * d);
}

struct TurningSetup {
    double sql;    // sqrt(lambda)
    double sgn;    // sign(h)
    double e;      // 1 + sqrt(lambda) h
    double abs_h;  // |h|
};

// integral over t in [ta, tb] of 2 t / sqrt(2 G(t)), G(t) = f_gap(-sgn sql t^2, e)
double turning_integral(const TurningSetup& ts, double ta, double tb, double rel_tol,
                        double& err) {
    const auto integrand = [&ts](double t) {
        const double d = -ts.sgn * ts.sql * t * t;
        const double g = f_gap(d, ts.e);
        if (!(g > 0.0)) {
            if (t == 0.0) return 0.0;  // removable endpoint, never sampled by GK
            throw std::runtime_error("time map: nonpositive energy gap");
        }
        return 2.0 * t / std::sqrt(2.0 * g);
    };
    const QuadResult q = integrate_gk(integrand, ta, tb, rel_tol, 1e-300);
    err = q.error;
    return q.value;
}

void validate_turning(double lambda, double h) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error("time map: lambda > 0 required");
    if (!std::isfinite(h) || h == 0.0)
        throw std::domain_error("time map: turning value h must be finite and nonzero");
    if (!(1.0 + std::sqrt(lambda) * h > 0.0))
        throw std::domain_error("time map: turning value below the barrier");
}

}  // namespace

PhiEval phi(double lambda, double h, double s, double rel_tol) {
    validate_turning(lambda, h);
    if (!std::isfinite(s) || s * h < 0.0 || std::fabs(s) > std::fabs(h) * (1.0 + 1e-12))
        throw std::domain_error("time map: s must lie between 0 and h");
    PhiEval out;
    out.lambda = lambda;
    out.h = h;
    out.s = s;
    if (s == 0.0) return out;

    TurningSetup ts;
    ts.sql = std::sqrt(lambda);
    ts.sgn = h > 0.0 ? 1.0 : -1.0;
    ts.e = 1.0 + ts.sql * h;
    ts.abs_h = std::fabs(h);
    const double abs_s = std::min(std::fabs(s), ts.abs_h);
    const double ta = std::sqrt(ts.abs_h - abs_s);
    const double tb = std::sqrt(ts.abs_h);
    double err = 0.0;
    out.value = ts.sgn * turning_integral(ts, ta, tb, rel_tol, err);
    out.err_est = err;
    return out;
}

PhiEval phi_at_turning(double lambda, double h, double rel_tol) {
    return phi(lambda, h, h, rel_tol);
}

double phi_value(double lambda, double h, double s, double rel_tol) {
    return phi(lambda, h, s, rel_tol).value;
}

double phi_turning_from_gap(double lambda, double gap, double rel_tol) {
    if (!(lambda > 0.0)) throw std::domain_error("time map: lambda > 0 required");
    if (!(gap > 0.0 && gap < 1.0))
        throw std::domain_error("time map: gap must lie in (0, 1) on the negative side");
    TurningSetup ts;
    ts.sql = std::sqrt(lambda);
    ts.sgn = -1.0;
    ts.e = gap;
    ts.abs_h = (1.0 - gap) / ts.sql;
    double err = 0.0;
    return -turning_integral(ts, 0.0, std::sqrt(ts.abs_h), rel_tol, err);
}

double phi_inverse(double lambda, double h, double target, double tol) {
    validate_turning(lambda, h);
    const double full = phi_at_turning(lambda, h).value;
    if (target == 0.0) return 0.0;
    if (target * full < 0.0 || std::fabs(target) > std::fabs(full) * (1.0 + 1e-10))
        throw std::domain_error("time map: inverse target out of range");
    if (std::fabs(target) >= std::fabs(full)) return h;

    const double sgn = h > 0.0 ? 1.0 : -1.0;
    const double at = std::fabs(target);
    double lo = 0.0, hi = std::fabs(h);
    double sigma = 0.5 * hi;
    for (int it = 0; it < 60; ++it) {
        const double v = std::fabs(phi_value(lambda, h, sgn * sigma));
        if (v < at) lo = sigma;
        else hi = sigma;
        sigma = 0.5 * (lo + hi);
        if (hi - lo < std::max(1e-13, 0.01 * tol) * std::max(1.0, std::fabs(h))) break;
    }
    // Newton polish: d|Phi|/dsigma = 1 / sqrt(2 (F(xi) - F(h)))
    const double sql = std::sqrt(lambda);
    const double e = 1.0 + sql * h;
    for (int it = 0; it < 4; ++it) {
        const double v = std::fabs(phi_value(lambda, h, sgn * sigma));
        const double d = sql * (sigma * sgn) - sql * h;  // u_xi - u_h
        const double g = f_gap(d, e);
        if (!(g > 0.0)) break;
        const double deriv = 1.0 / std::sqrt(2.0 * g);
        const double step = (v - at) / deriv;
        const double next = sigma - step;
        if (!(next > lo && next < hi)) break;
        sigma = next;
    }
    return sgn * sigma;
}

PhiLimits phi_limits(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("phi_limits: lambda > 0 required");
    const double sql = std::sqrt(lambda);
    PhiLimits l;
    l.zero_plus = M_PI / (2.0 * std::sqrt(2.0) * sql);
    l.infinity = M_PI / (2.0 * sql);
    l.zero_minus = -l.zero_plus;
    l.barrier = 0.0;
    return l;
}

LimitProbes extrapolate_limits(double lambda) {
    LimitProbes p;
    p.analytic = phi_limits(lambda);
    const double sql = std::sqrt(lambda);

    const auto geometric_probe = [&](double sign) {
        std::vector<double> vals;
        for (int j = 0; j < 8; ++j) {
            const double u = sign * 0.2 * std::pow(0.5, j);
            vals.push_back(phi_at_turning(lambda, u / sql).value);
        }
        return richardson_extrapolate(vals, 0.5);
    };
    p.zero_plus = geometric_probe(+1.0);
    p.zero_minus = geometric_probe(-1.0);
    p.infinity = phi_at_turning(lambda, 1e4 / sql).value;

    // barrier limit: fit value = c0 + c1 x + c2 x^2 + c3 x^3 with
    // x = 1/sqrt(|F|(gap)) along gap = 10^-35 .. 10^-60 and report c0
    std::vector<double> xs, vs;
    for (int j = 6; j < 12; ++j) {
        const double gap = std::pow(10.0, -5.0 * (j + 1));
        const double u = gap - 1.0;
        const double absF = -(std::log(gap) - u - 0.5 * u * u);
        xs.push_back(1.0 / std::sqrt(absF));
        vs.push_back(phi_turning_from_gap(lambda, gap));
    }
    p.barrier = polyfit(xs, vs, 3)[0];
    return p;
}

}  // namespace singbif::timemap
