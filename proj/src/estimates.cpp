#include "singbif/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "singbif/timemap.hpp"
#include "singbif/util.hpp"

namespace singbif::estimates {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

CheckResult make_check(std::string id, double lhs, double rhs, double tol,
                       double extra_scale = 0.0) {
    CheckResult c;
    c.id = std::move(id);
    c.lhs = lhs;
    c.rhs = rhs;
    c.margin = rhs - lhs;
    c.scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs), extra_scale});
    c.pass = c.margin >= -tol * c.scale;
    return c;
}

void fold_worst(CheckResult& agg, const CheckResult& cur) {
    if (agg.id.empty() || cur.margin / cur.scale < agg.margin / agg.scale) agg = cur;
}

/// Unnormalized time-map integral sqrt(2) * Phi, the form the inequality
/// chains are stated in. s is clamped into the admissible [0, h] side.
double phi_lit(double lambda, double h, double s) {
    if (h > 0.0) s = std::clamp(s, 0.0, h);
    else s = std::clamp(s, h, 0.0);
    return kSqrt2 * timemap::phi_value(lambda, h, s, 1e-11);
}

struct SegGeometry {
    double rho_bar, rho_0, h;
    bool crit_first;  // A, C
};

SegGeometry geometry(const ode::Segment& seg) {
    SegGeometry g;
    g.crit_first =
        seg.kind == ode::SegmentCase::A || seg.kind == ode::SegmentCase::C;
    g.rho_bar = g.crit_first ? seg.r1 : seg.r2;
    g.rho_0 = g.crit_first ? seg.r2 : seg.r1;
    g.h = g.crit_first ? seg.w_r1 : seg.w_r2;
    return g;
}

}  // namespace

std::pair<double, double> check_log_inequality(double a, double b) {
    if (!(0.0 < a && a < b))
        throw std::domain_error("check_log_inequality: need 0 < a < b");
    const double ln = std::log(b / a);
    return {ln - (b - a) / b, (b - a) / a - ln};
}

SegmentCheck check_sandwich(const ode::RadialTrajectory& traj, const ode::Segment& seg,
                            int samples, double tol) {
    SegmentCheck sc;
    sc.kind = seg.kind;
    sc.r1 = seg.r1;
    sc.r2 = seg.r2;
    sc.tol = tol;
    const SegGeometry g = geometry(seg);
    sc.h = g.h;
    const double lambda = traj.lambda;
    const double phi_h = phi_lit(lambda, g.h, g.h);

    CheckResult worst_lo, worst_hi, worst_order;
    for (int i = 1; i <= samples; ++i) {
        const double rho = seg.r1 + (seg.r2 - seg.r1) * i / (samples + 1);
        const double w = traj.w_at(rho);
        const double phi_w = phi_lit(lambda, g.h, w);
        double middle, env_lo, env_hi;
        switch (seg.kind) {
            case ode::SegmentCase::A:
                middle = phi_h - phi_w;
                env_lo = (g.rho_bar > 0.0)
                             ? kSqrt2 * g.rho_bar * std::log(rho / g.rho_bar)
                             : 0.0;
                env_hi = kSqrt2 * (rho - g.rho_bar);
                break;
            case ode::SegmentCase::C:
                middle = phi_w - phi_h;
                env_lo = (g.rho_bar > 0.0)
                             ? kSqrt2 * g.rho_bar * std::log(rho / g.rho_bar)
                             : 0.0;
                env_hi = kSqrt2 * (rho - g.rho_bar);
                break;
            case ode::SegmentCase::B:
                middle = phi_w - phi_h;
                env_lo = kSqrt2 * (g.rho_bar - rho);
                env_hi = kSqrt2 * g.rho_bar * std::log(g.rho_bar / rho);
                break;
            case ode::SegmentCase::D:
            default:
                middle = phi_h - phi_w;
                env_lo = kSqrt2 * (g.rho_bar - rho);
                env_hi = kSqrt2 * g.rho_bar * std::log(g.rho_bar / rho);
                break;
        }
        fold_worst(worst_lo, make_check("sandwich-lower", env_lo, middle, tol, phi_h));
        fold_worst(worst_hi, make_check("sandwich-upper", middle, env_hi, tol, phi_h));
        fold_worst(worst_order, make_check("envelope-order", env_lo, env_hi, tol, phi_h));
    }
    sc.checks.push_back(worst_lo);
    sc.checks.push_back(worst_hi);
    sc.checks.push_back(worst_order);

    // energy sandwich between the segment ends
    const double dF = ode::F_lambda(lambda, seg.w_r2) - ode::F_lambda(lambda, seg.w_r1);
    const double q = seg.r2 * seg.r2 * seg.dw_r2 * seg.dw_r2 -
                     seg.r1 * seg.r1 * seg.dw_r1 * seg.dw_r1;
    const bool ac = g.crit_first;
    const double elo = ac ? 2.0 * seg.r1 * seg.r1 * dF : 2.0 * seg.r2 * seg.r2 * dF;
    const double ehi = ac ? 2.0 * seg.r2 * seg.r2 * dF : 2.0 * seg.r1 * seg.r1 * dF;
    sc.checks.push_back(make_check("energy-sandwich-lower", elo, q, tol, ehi));
    sc.checks.push_back(make_check("energy-sandwich-upper", q, ehi, tol, elo));

    sc.pass = std::all_of(sc.checks.begin(), sc.checks.end(),
                          [](const CheckResult& c) { return c.pass; });
    return sc;
}

SegmentCheck check_interval_and_derivative(const ode::RadialTrajectory& traj,
                                           const ode::Segment& seg, double tol) {
    SegmentCheck sc;
    sc.kind = seg.kind;
    sc.r1 = seg.r1;
    sc.r2 = seg.r2;
    sc.tol = tol;
    const SegGeometry g = geometry(seg);
    sc.h = g.h;
    const double lambda = traj.lambda;
    const double phi_h = phi_lit(lambda, g.h, g.h);
    const double ratio = (g.rho_bar > 0.0 || g.crit_first)
                             ? (g.crit_first ? g.rho_bar / g.rho_0 : g.rho_bar / g.rho_0)
                             : 0.0;
    const double sqrtF = std::sqrt(-ode::F_lambda(lambda, g.h));
    const double dw0 =
        g.crit_first ? traj.dw_at(seg.r2) : seg.dw_r1;  // derivative at the node end

    const double gap = std::fabs(g.rho_0 - g.rho_bar);
    const double logterm =
        (g.rho_bar > 0.0)
            ? kSqrt2 * g.rho_bar *
                  std::fabs(std::log(std::max(g.rho_0, g.rho_bar) /
                                     std::min(g.rho_0, g.rho_bar)))
            : 0.0;

    switch (seg.kind) {
        case ode::SegmentCase::A:
            sc.checks.push_back(
                make_check("interval-chain-1", kSqrt2 * ratio * gap, logterm, tol));
            sc.checks.push_back(make_check("interval-chain-2", logterm, phi_h, tol));
            sc.checks.push_back(
                make_check("interval-chain-3", phi_h, kSqrt2 * gap, tol));
            sc.checks.push_back(
                make_check("derivative-lower", kSqrt2 * ratio * sqrtF, -dw0, tol));
            sc.checks.push_back(
                make_check("derivative-upper", -dw0, kSqrt2 * sqrtF, tol));
            break;
        case ode::SegmentCase::C:
            sc.checks.push_back(
                make_check("interval-chain-1", kSqrt2 * ratio * gap, logterm, tol));
            sc.checks.push_back(make_check("interval-chain-2", logterm, -phi_h, tol));
            sc.checks.push_back(
                make_check("interval-chain-3", -phi_h, kSqrt2 * gap, tol));
            sc.checks.push_back(
                make_check("derivative-lower", kSqrt2 * ratio * sqrtF, dw0, tol));
            sc.checks.push_back(
                make_check("derivative-upper", dw0, kSqrt2 * sqrtF, tol));
            break;
        case ode::SegmentCase::B:
            sc.checks.push_back(
                make_check("interval-chain-1", kSqrt2 * gap, -phi_h, tol));
            sc.checks.push_back(make_check("interval-chain-2", -phi_h, logterm, tol));
            sc.checks.push_back(
                make_check("interval-chain-3", logterm, kSqrt2 * ratio * gap, tol));
            sc.checks.push_back(
                make_check("derivative-lower", kSqrt2 * sqrtF, -dw0, tol));
            sc.checks.push_back(
                make_check("derivative-upper", -dw0, kSqrt2 * ratio * sqrtF, tol));
            break;
        case ode::SegmentCase::D:
        default:
            sc.checks.push_back(
                make_check("interval-chain-1", kSqrt2 * gap, phi_h, tol));
            sc.checks.push_back(make_check("interval-chain-2", phi_h, logterm, tol));
            sc.checks.push_back(
                make_check("interval-chain-3", logterm, kSqrt2 * ratio * gap, tol));
            sc.checks.push_back(
                make_check("derivative-lower", kSqrt2 * sqrtF, dw0, tol));
            sc.checks.push_back(
                make_check("derivative-upper", dw0, kSqrt2 * ratio * sqrtF, tol));
            break;
    }
    sc.pass = std::all_of(sc.checks.begin(), sc.checks.end(),
                          [](const CheckResult& c) { return c.pass; });
    return sc;
}

double mixed_eigenvalue(double r1, double r2, MixedBc bc, double rel_tol) {
    if (!(0.0 <= r1 && r1 < r2))
        throw std::invalid_argument("mixed_eigenvalue: need 0 <= r1 < r2");
    if (bc == MixedBc::dirichlet_neumann && r1 <= 0.0)
        throw std::invalid_argument(
            "mixed_eigenvalue: dirichlet-neumann requires r1 > 0");

    ode::IntegrateOptions opts;
    opts.tol = 1e-11;

    const auto predicate = [&](double mu) -> bool {
        ode::RadialRhs rhs;
        rhs.f = [mu](double w) { return -mu * w; };
        rhs.fprime = [mu](double) { return -mu; };
        const ode::RadialTrajectory t =
            (bc == MixedBc::neumann_dirichlet)
                ? ode::integrate_ivp(rhs, 1.0, r1 == 0.0 ? 0.0 : 0.0, r1, r2, opts)
                : ode::integrate_ivp(rhs, 0.0, 1.0, r1, r2, opts);
        if (bc == MixedBc::neumann_dirichlet)
            return !t.nodes.empty() || t.w.back() < 0.0;
        return !t.crits.empty() || t.dw.back() < 0.0;
    };

    const double len = r2 - r1;
    double hi = 1.0 / (len * len);
    int doublings = 0;
    while (!predicate(hi)) {
        hi *= 2.0;
        if (++doublings > 70)
            throw std::runtime_error("mixed_eigenvalue: bracketing failure");
    }
    double lo = (doublings == 0) ? 0.0 : hi / 2.0;
    while (hi - lo > rel_tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (predicate(mid)) hi = mid;
        else lo = mid;
    }
    const double mu = 0.5 * (lo + hi);
    if (predicate(mu * (1.0 - 1e-8)))
        throw std::runtime_error("mixed_eigenvalue: eigenfunction not positive");
    return mu;
}

LambdaBounds lambda_interval(double radius, int k) {
    if (k < 1) throw std::invalid_argument("lambda_interval: k >= 1 required");
    LambdaBounds b;
    // The first segment of a w(0) > 0 solution runs from the center critical
    // point to the first node; its mixed eigenvalue dominates the full-disk
    // one, which is the Dirichlet-at-R problem.
    b.lo = 0.5 * mixed_eigenvalue(0.0, radius, MixedBc::neumann_dirichlet);

    const double len = radius / (2.0 * k);
    double worst = 0.0;
    for (double a : linspace(0.0, radius - len, 33)) {
        worst = std::max(worst,
                         mixed_eigenvalue(a, a + len, MixedBc::neumann_dirichlet, 1e-9));
        worst = std::max(worst, mixed_eigenvalue(std::max(a, 1e-6 * radius), a + len,
                                                 MixedBc::dirichlet_neumann, 1e-9));
    }
    b.hi = 1.005 * worst;
    return b;
}

LambdaBoundReport check_lambda_bounds(const ode::RadialTrajectory& traj,
                                      const LambdaBounds* global, double tol) {
    LambdaBoundReport rep;
    const double lambda = traj.lambda;
    for (const ode::Segment& seg : traj.segments) {
        const bool ac =
            seg.kind == ode::SegmentCase::A || seg.kind == ode::SegmentCase::C;
        const MixedBc bc = ac ? MixedBc::neumann_dirichlet : MixedBc::dirichlet_neumann;
        const double mu = mixed_eigenvalue(seg.r1, seg.r2, bc, 1e-10);
        // Pairing the equation with the segment eigenfunction gives
        // mu = lambda * <1 + 1/(1 + sqrt(lambda) w)>; on w >= 0 segments the
        // weight lies in [1, 2], on w <= 0 segments in [2, 1 + 1/gap].
        const double turning = geometry(seg).h;
        if (turning > 0.0) {
            rep.checks.push_back(
                make_check("segment-mu-half-le-lambda", 0.5 * mu, lambda, tol));
            rep.checks.push_back(make_check("segment-lambda-le-mu", lambda, mu, tol));
        } else {
            const double gap = 1.0 + std::sqrt(lambda) * turning;
            rep.checks.push_back(make_check("segment-mu-weighted-le-lambda",
                                            mu / (1.0 + 1.0 / gap), lambda, tol));
            rep.checks.push_back(
                make_check("segment-lambda-le-mu-half", lambda, 0.5 * mu, tol));
        }
    }
    if (global) {
        rep.global = *global;
        if (traj.h > 0.0)
            rep.checks.push_back(make_check("global-lower", global->lo, lambda, tol));
        rep.checks.push_back(make_check("global-upper", lambda, global->hi, tol));
    }
    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const CheckResult& c) { return c.pass; });
    return rep;
}

PointReport verify_point(const ode::RadialTrajectory& traj, const LambdaBounds* global,
                         double tol, int samples) {
    PointReport rep;
    const double lambda = traj.lambda;

    CheckResult classified;
    classified.id = "segments-classified";
    classified.pass = traj.fully_classified && !traj.segments.empty();
    classified.margin = classified.pass ? 0.0 : -1.0;
    rep.extra.push_back(classified);

    for (const ode::Segment& seg : traj.segments) {
        rep.segments.push_back(check_sandwich(traj, seg, samples, tol));
        rep.segments.push_back(check_interval_and_derivative(traj, seg, tol));
        const double p1 = seg.dw_r1 * seg.dw_r1;
        const double p2 = seg.dw_r2 * seg.dw_r2;
        const double scale = std::max(
            {1.0, seg.r2 * seg.r2 * p2, seg.r1 * seg.r1 * p1,
             2.0 * seg.r2 * seg.r2 * std::fabs(ode::F_lambda(lambda, seg.w_r2))});
        const double resid = ode::energy_residual(traj, seg.r1, seg.r2, 1e-12);
        rep.extra.push_back(make_check("energy-identity", resid, tol * scale, tol, scale));
    }

    // nodal interval structure: even intervals at least pi / (4 sqrt(lambda))
    std::vector<double> bounds = {0.0};
    bounds.insert(bounds.end(), traj.nodes.begin(), traj.nodes.end());
    bounds.push_back(traj.radius);
    const double even_floor = M_PI / (4.0 * std::sqrt(lambda)) - 1e-8;
    for (std::size_t i = 0; i + 1 < bounds.size(); i += 2)
        rep.extra.push_back(make_check("even-interval", even_floor,
                                       bounds[i + 1] - bounds[i], tol));
    if (global && traj.h > 0.0 && !traj.nodes.empty()) {
        const double first_floor = M_PI / (4.0 * std::sqrt(global->hi)) - 1e-8;
        rep.extra.push_back(make_check("first-node", first_floor, traj.nodes[0], tol));
    }

    rep.lambda_bounds = check_lambda_bounds(traj, global, tol);

    rep.worst_margin = std::numeric_limits<double>::infinity();
    bool pass = true;
    const auto fold = [&](const CheckResult& c) {
        pass = pass && c.pass;
        rep.worst_margin = std::min(rep.worst_margin, c.margin / c.scale);
    };
    for (const SegmentCheck& sc : rep.segments)
        for (const CheckResult& c : sc.checks) fold(c);
    for (const CheckResult& c : rep.extra) fold(c);
    for (const CheckResult& c : rep.lambda_bounds.checks) fold(c);
    rep.pass = pass;
    return rep;
}

}  // namespace singbif::estimates
