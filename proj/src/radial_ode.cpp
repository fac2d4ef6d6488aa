#include "singbif/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "singbif/quadrature.hpp"

namespace singbif::ode {

namespace {

void check_param(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error("radial nonlinearity: lambda > 0 required");
}

double barrier_gap_or_throw(double lambda, double w) {
    const double gap = 1.0 + std::sqrt(lambda) * w;
    if (!(gap > 0.0))
        throw std::domain_error("radial nonlinearity: barrier violated at w = " +
                                std::to_string(w));
    return gap;
}

}  // namespace

double f_lambda(double lambda, double w) {
    check_param(lambda);
    if (!std::isfinite(w)) throw std::domain_error("f_lambda: non-finite state");
    const double gap = barrier_gap_or_throw(lambda, w);
    return -lambda * w * (1.0 + 1.0 / gap);
}

double f_lambda_prime(double lambda, double w) {
    check_param(lambda);
    const double gap = barrier_gap_or_throw(lambda, w);
    return -lambda * (1.0 + 1.0 / (gap * gap));
}

double F_lambda(double lambda, double s) {
    check_param(lambda);
    if (!std::isfinite(s)) throw std::domain_error("F_lambda: non-finite state");
    const double u = std::sqrt(lambda) * s;
    if (!(1.0 + u > 0.0))
        throw std::domain_error("F_lambda: barrier violated at s = " + std::to_string(s));
    if (std::fabs(u) < 0.25) {
        // F(u) = -u^2 (1 - u/3 + u^2/4 - u^3/5 + ...), exact sign for small u
        double sum = 1.0, p = 1.0;
        for (int m = 1; m < 40; ++m) {
            p *= -u;
            const double term = p / (m + 2);
            sum += term;
            if (std::fabs(term) < 1e-19 * std::fabs(sum)) break;
        }
        return -u * u * sum;
    }
    return std::log1p(u) - u - 0.5 * u * u;
}

double h_ancestor(double lambda, double s) {
    check_param(lambda);
    const double gap = barrier_gap_or_throw(lambda, s);
    return lambda * std::sqrt(lambda) * s * s / gap;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with the classic quartic dense output.

namespace {

using State = std::array<double, 2>;

constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

double dense_eval(const DenseStep& s, int comp, double theta) {
    const double t = theta, u = 1.0 - theta;
    return s.c1[comp] +
           t * (s.c2[comp] + u * (s.c3[comp] + t * (s.c4[comp] + u * s.c5[comp])));
}

double dense_eval_dtheta(const DenseStep& s, int comp, double theta) {
    const double t = theta;
    return s.c2[comp] + (1.0 - 2.0 * t) * s.c3[comp] + t * (2.0 - 3.0 * t) * s.c4[comp] +
           2.0 * t * (1.0 - t) * (1.0 - 2.0 * t) * s.c5[comp];
}

// Root of theta -> dense(comp, theta) inside a sign-change subinterval.
double dense_root(const DenseStep& s, int comp, double ta, double tb) {
    double fa = dense_eval(s, comp, ta);
    double fb = dense_eval(s, comp, tb);
    if (fa == 0.0) return ta;
    if (fb == 0.0) return tb;
    double t = 0.5 * (ta + tb);
    for (int it = 0; it < 80; ++it) {
        const double ft = dense_eval(s, comp, t);
        if (ft == 0.0) break;
        if (ft * fa < 0.0) { tb = t; fb = ft; }
        else { ta = t; fa = ft; }
        const double d = dense_eval_dtheta(s, comp, t);
        double tn = (d != 0.0) ? t - ft / d : 0.5 * (ta + tb);
        if (!(tn > ta && tn < tb)) tn = 0.5 * (ta + tb);
        if (std::fabs(tn - t) < 1e-16) { t = tn; break; }
        t = tn;
    }
    (void)fb;
    return t;
}

}  // namespace

RadialTrajectory integrate_ivp(const RadialRhs& rhs, double w0, double dw0,
                               double rho_start, double radius,
                               const IntegrateOptions& opts) {
    if (!(radius > rho_start && rho_start >= 0.0))
        throw std::invalid_argument("integrate_ivp: need 0 <= rho_start < radius");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("integrate_ivp: tol > 0 required");

    RadialTrajectory traj;
    traj.h = w0;
    traj.radius = radius;
    traj.rho_start = rho_start;

    double rho;
    State y;
    if (rho_start == 0.0) {
        if (dw0 != 0.0)
            throw std::invalid_argument("integrate_ivp: dw0 must vanish at rho = 0");
        // Series launch past the 0/0 coordinate singularity:
        // w = w0 + a rho^2 + b rho^4 with 4a = f(w0), 16b = f'(w0) a.
        const double a = rhs.f(w0) / 4.0;
        const double b = rhs.fprime ? rhs.fprime(w0) * a / 16.0 : 0.0;
        const double rl = opts.launch_fraction * radius;
        traj.launch_a = a;
        traj.launch_b = b;
        traj.launch_rho = rl;
        traj.grid.push_back(0.0);
        traj.w.push_back(w0);
        traj.dw.push_back(0.0);
        rho = rl;
        y = {w0 + a * rl * rl + b * rl * rl * rl * rl,
             2.0 * a * rl + 4.0 * b * rl * rl * rl};
    } else {
        traj.launch_rho = rho_start;
        rho = rho_start;
        y = {w0, dw0};
    }
    traj.grid.push_back(rho);
    traj.w.push_back(y[0]);
    traj.dw.push_back(y[1]);

    const bool barrier = static_cast<bool>(rhs.gap);
    double gmin = barrier ? std::min(rhs.gap(w0), rhs.gap(y[0]))
                          : std::numeric_limits<double>::quiet_NaN();

    auto deriv = [&rhs](double r, const State& s) -> State {
        return {s[1], rhs.f(s[0]) - s[1] / r};
    };

    double hstep = std::min(1e-3 * (radius - rho), radius - rho);
    State k1 = deriv(rho, y);
    long steps_taken = 0;
    // absolute error floor tied to the problem's state scale, so tiny
    // amplitudes are resolved relative to themselves
    const double state_scale =
        std::max({std::fabs(w0), std::fabs(dw0), 1e-290});

    while (rho < radius * (1.0 - 1e-15)) {
        if (++steps_taken > 5'000'000)
            throw std::runtime_error("integrate_ivp: step budget exhausted");
        hstep = std::min(hstep, radius - rho);
        if (hstep < 1e-14 * radius) {
            if (barrier && gmin < 1e3 * opts.barrier_floor) throw BarrierHit(rho);
            throw std::runtime_error("integrate_ivp: step size underflow at rho = " +
                                     std::to_string(rho));
        }

        State k2, k3, k4, k5, k6, k7, ynew;
        bool stage_ok = true;
        try {
            State t;
            t = {y[0] + hstep * A21 * k1[0], y[1] + hstep * A21 * k1[1]};
            k2 = deriv(rho + C2 * hstep, t);
            t = {y[0] + hstep * (A31 * k1[0] + A32 * k2[0]),
                 y[1] + hstep * (A31 * k1[1] + A32 * k2[1])};
            k3 = deriv(rho + C3 * hstep, t);
            t = {y[0] + hstep * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
                 y[1] + hstep * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1])};
            k4 = deriv(rho + C4 * hstep, t);
            t = {y[0] + hstep * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
                 y[1] + hstep * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1])};
            k5 = deriv(rho + C5 * hstep, t);
            t = {y[0] + hstep * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] +
                                 A65 * k5[0]),
                 y[1] + hstep * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] +
                                 A65 * k5[1])};
            k6 = deriv(rho + hstep, t);
            ynew = {y[0] + hstep * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] +
                                    B6 * k6[0]),
                    y[1] + hstep * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] +
                                    B6 * k6[1])};
            k7 = deriv(rho + hstep, ynew);
        } catch (const std::domain_error&) {
            stage_ok = false;  // stage crossed the barrier; retry smaller
        }
        if (!stage_ok) {
            hstep *= 0.25;
            continue;
        }

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double e = hstep * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                      E6 * k6[i] + E7 * k7[i]);
            const double sc =
                opts.tol *
                (state_scale + std::max(std::fabs(y[i]), std::fabs(ynew[i])));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(0.5 * err);

        if (err > 1.0) {
            hstep *= std::max(0.1, 0.9 * std::pow(err, -0.2));
            continue;
        }

        // accepted
        DenseStep ds;
        ds.rho0 = rho;
        ds.h = hstep;
        for (int i = 0; i < 2; ++i) {
            const double dy = ynew[i] - y[i];
            const double bspl = hstep * k1[i] - dy;
            ds.c1[i] = y[i];
            ds.c2[i] = dy;
            ds.c3[i] = bspl;
            ds.c4[i] = dy - hstep * k7[i] - bspl;
            ds.c5[i] = hstep * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] +
                                D6 * k6[i] + D7 * k7[i]);
        }

        // events on the dense output: w = 0 and dw = 0
        constexpr int kScan = 8;
        for (int comp = 0; comp < 2; ++comp) {
            double prev_t = 0.0;
            double prev_v = dense_eval(ds, comp, 0.0);
            for (int j = 1; j <= kScan; ++j) {
                const double tj = static_cast<double>(j) / kScan;
                const double vj = dense_eval(ds, comp, tj);
                if ((prev_v < 0.0 && vj > 0.0) || (prev_v > 0.0 && vj < 0.0) ||
                    (vj == 0.0 && prev_v != 0.0)) {
                    const double troot = dense_root(ds, comp, prev_t, tj);
                    const double rroot = rho + troot * hstep;
                    auto& list = (comp == 0) ? traj.nodes : traj.crits;
                    // Roots hugging the final radius are boundary-condition
                    // zeros displaced by the shooting residual (offset
                    // ~ |dw(R)| / |ddw|), not interior events.
                    if (rroot > traj.rho_start + 1e-9 * radius &&
                        rroot < radius * (1.0 - 1e-5) &&
                        (list.empty() || rroot - list.back() > 1e-12 * radius))
                        list.push_back(rroot);
                }
                prev_t = tj;
                prev_v = vj;
            }
        }

        if (barrier) {
            double glocal = rhs.gap(ynew[0]);
            double gtheta_min = glocal;
            double ttheta_min = 1.0;
            for (double th : {0.25, 0.5, 0.75}) {
                const double g = rhs.gap(dense_eval(ds, 0, th));
                if (g < gtheta_min) { gtheta_min = g; ttheta_min = th; }
            }
            gmin = std::min(gmin, gtheta_min);
            if (gtheta_min < opts.barrier_floor) {
                // locate the crossing of gap = floor on the dense output
                double lo = 0.0, hi = ttheta_min;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (rhs.gap(dense_eval(ds, 0, mid)) > opts.barrier_floor) lo = mid;
                    else hi = mid;
                }
                throw BarrierHit(rho + hi * hstep);
            }
        }

        traj.steps.push_back(ds);
        rho += hstep;
        y = ynew;
        k1 = k7;  // FSAL
        traj.grid.push_back(rho);
        traj.w.push_back(y[0]);
        traj.dw.push_back(y[1]);

        hstep *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }

    traj.grid.back() = radius;
    traj.residual = y[1];
    traj.barrier_min = gmin;

    // segment classification between consecutive node/critical events
    struct Ev {
        double rho;
        bool is_node;
    };
    std::vector<Ev> evs;
    if (rho_start == 0.0 || dw0 == 0.0) evs.push_back({traj.rho_start, false});
    else if (w0 == 0.0) evs.push_back({traj.rho_start, true});
    {
        std::size_t in = 0, ic = 0;
        while (in < traj.nodes.size() || ic < traj.crits.size()) {
            const bool take_node =
                ic >= traj.crits.size() ||
                (in < traj.nodes.size() && traj.nodes[in] < traj.crits[ic]);
            if (take_node) evs.push_back({traj.nodes[in++], true});
            else evs.push_back({traj.crits[ic++], false});
        }
    }
    double scale_dw = 1.0, scale_w = 1.0;
    for (std::size_t i = 0; i < traj.w.size(); ++i) {
        scale_w = std::max(scale_w, std::fabs(traj.w[i]));
        scale_dw = std::max(scale_dw, std::fabs(traj.dw[i]));
    }
    bool end_is_event = false;
    if (std::fabs(y[1]) <= 1e-8 * scale_dw) {
        evs.push_back({radius, false});
        end_is_event = true;
    } else if (std::fabs(y[0]) <= 1e-8 * scale_w) {
        evs.push_back({radius, true});
        end_is_event = true;
    }
    traj.fully_classified = end_is_event && evs.size() >= 2;
    for (std::size_t i = 0; i + 1 < evs.size(); ++i) {
        const Ev& e1 = evs[i];
        const Ev& e2 = evs[i + 1];
        if (e1.is_node == e2.is_node) {
            traj.fully_classified = false;
            continue;
        }
        Segment seg;
        seg.r1 = e1.rho;
        seg.r2 = e2.rho;
        seg.w_r1 = traj.w_at(e1.rho);
        seg.w_r2 = traj.w_at(e2.rho);
        seg.dw_r1 = traj.dw_at(e1.rho);
        seg.dw_r2 = traj.dw_at(e2.rho);
        if (!e1.is_node)
            seg.kind = seg.w_r1 > 0.0 ? SegmentCase::A : SegmentCase::C;
        else
            seg.kind = seg.w_r2 > 0.0 ? SegmentCase::D : SegmentCase::B;
        traj.segments.push_back(seg);
    }
    return traj;
}

RadialTrajectory integrate(double lambda, double h, double radius,
                           const IntegrateOptions& opts) {
    check_param(lambda);
    if (h == 0.0) throw std::invalid_argument("integrate: trivial amplitude h = 0");
    if (!(1.0 + std::sqrt(lambda) * h > 0.0))
        throw std::domain_error("integrate: initial amplitude below the barrier");
    const double sql = std::sqrt(lambda);
    RadialRhs rhs;
    rhs.f = [lambda](double w) { return f_lambda(lambda, w); };
    rhs.fprime = [lambda](double w) { return f_lambda_prime(lambda, w); };
    rhs.gap = [sql](double w) { return 1.0 + sql * w; };
    RadialTrajectory traj = integrate_ivp(rhs, h, 0.0, 0.0, radius, opts);
    traj.lambda = lambda;
    return traj;
}

double RadialTrajectory::w_at(double rho) const {
    if (rho_start == 0.0 && rho <= launch_rho)
        return h + launch_a * rho * rho + launch_b * rho * rho * rho * rho;
    if (steps.empty()) return w.back();
    auto it = std::upper_bound(steps.begin(), steps.end(), rho,
                               [](double r, const DenseStep& s) { return r < s.rho0; });
    const std::size_t idx = (it == steps.begin()) ? 0 : static_cast<std::size_t>(it - steps.begin() - 1);
    const DenseStep& s = steps[idx];
    const double theta = std::clamp((rho - s.rho0) / s.h, 0.0, 1.0);
    return dense_eval(s, 0, theta);
}

double RadialTrajectory::dw_at(double rho) const {
    if (rho_start == 0.0 && rho <= launch_rho)
        return 2.0 * launch_a * rho + 4.0 * launch_b * rho * rho * rho;
    if (steps.empty()) return dw.back();
    auto it = std::upper_bound(steps.begin(), steps.end(), rho,
                               [](double r, const DenseStep& s) { return r < s.rho0; });
    const std::size_t idx = (it == steps.begin()) ? 0 : static_cast<std::size_t>(it - steps.begin() - 1);
    const DenseStep& s = steps[idx];
    const double theta = std::clamp((rho - s.rho0) / s.h, 0.0, 1.0);
    return dense_eval(s, 1, theta);
}

double RadialTrajectory::sup_w() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : w) m = std::max(m, v);
    for (double r : crits) m = std::max(m, w_at(r));
    return m;
}

double RadialTrajectory::inf_w() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : w) m = std::min(m, v);
    for (double r : crits) m = std::min(m, w_at(r));
    return m;
}

double energy_residual(const RadialTrajectory& traj, double rho1, double rho2,
                       double quad_tol) {
    if (!(traj.lambda > 0.0))
        throw std::invalid_argument("energy_residual: nonlinear trajectory required");
    const double lambda = traj.lambda;
    const auto F = [lambda, &traj](double r) { return F_lambda(lambda, traj.w_at(r)); };
    const double p1 = traj.dw_at(rho1) * traj.dw_at(rho1);
    const double p2 = traj.dw_at(rho2) * traj.dw_at(rho2);
    const QuadResult I = integrate_gk(
        [&](double s) { return 4.0 * s * F_lambda(lambda, traj.w_at(s)); }, rho1, rho2,
        quad_tol, 1e-16);
    const double lhs = rho2 * rho2 * p2 - rho1 * rho1 * p1;
    const double rhs =
        2.0 * rho2 * rho2 * F(rho2) - 2.0 * rho1 * rho1 * F(rho1) - I.value;
    return std::fabs(lhs - rhs);
}

}  // namespace singbif::ode
