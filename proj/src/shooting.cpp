#include "singbif/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "singbif/specfun.hpp"
#include "singbif/util.hpp"

namespace singbif::shooting {

ShotOutcome shoot_residual(double lambda, double h, double radius,
                           const ode::IntegrateOptions& opts) {
    ShotOutcome out;
    try {
        const ode::RadialTrajectory traj = ode::integrate(lambda, h, radius, opts);
        out.residual = traj.residual;
        out.nodes = traj.node_count();
    } catch (const ode::BarrierHit& bh) {
        out.barrier_hit = true;
        out.rho_reached = bh.rho_reached;
    }
    return out;
}

namespace {

BranchPoint point_from(const ode::RadialTrajectory& traj) {
    BranchPoint p;
    p.lambda = traj.lambda;
    p.h = traj.h;
    p.k = traj.node_count();
    p.sup_w = traj.sup_w();
    p.inf_w = traj.inf_w();
    p.barrier_gap = traj.barrier_min;
    p.nodes = traj.nodes;
    return p;
}

}  // namespace

BranchPoint solve_lambda(int k, double h, double lam_lo, double lam_hi, double radius,
                         const TraceControls& ctl, ode::RadialTrajectory* out_traj) {
    if (!(lam_lo < lam_hi) || !(lam_lo > 0.0))
        throw BracketError("solve_lambda: invalid bracket");
    auto eval = [&](double lam) -> ode::RadialTrajectory {
        return ode::integrate(lam, h, radius, ctl.ode);
    };

    ode::RadialTrajectory tlo, thi;
    try {
        tlo = eval(lam_lo);
        thi = eval(lam_hi);
    } catch (const ode::BarrierHit&) {
        throw BracketError("solve_lambda: barrier hit at a bracket end");
    }
    if (tlo.node_count() != k || thi.node_count() != k)
        throw NodalError("solve_lambda: node count mismatch at bracket ends (" +
                         std::to_string(tlo.node_count()) + ", " +
                         std::to_string(thi.node_count()) + ") wanted " +
                         std::to_string(k));
    double flo = tlo.residual, fhi = thi.residual;
    if (flo == 0.0) {
        if (out_traj) *out_traj = tlo;
        return point_from(tlo);
    }
    if (fhi == 0.0) {
        if (out_traj) *out_traj = thi;
        return point_from(thi);
    }
    if (flo * fhi > 0.0) throw BracketError("solve_lambda: no sign change in bracket");

    // Illinois regula falsi inside the bracket; iterate until the residual
    // meets the tolerance AND lambda itself is pinned, so re-solves agree
    double a = lam_lo, b = lam_hi, fa = flo, fb = fhi;
    ode::RadialTrajectory best = std::fabs(fa) < std::fabs(fb) ? tlo : thi;
    for (int it = 0;
         it < 200 && (std::fabs(best.residual) > ctl.shoot_tol ||
                      b - a > 1e-12 * std::max(1.0, b));
         ++it) {
        double m = b - fb * (b - a) / (fb - fa);
        const double width = b - a;
        if (!(m > a + 1e-17 * width && m < b - 1e-17 * width)) m = 0.5 * (a + b);
        ode::RadialTrajectory tm;
        try {
            tm = eval(m);
        } catch (const ode::BarrierHit&) {
            throw BracketError("solve_lambda: barrier hit inside bracket");
        }
        const double fm = tm.residual;
        if (std::fabs(fm) < std::fabs(best.residual)) best = tm;
        if (fm == 0.0) break;
        if (fm * fa < 0.0) {
            b = m;
            fb = fm;
            fa *= 0.5;  // Illinois weighting keeps both ends moving
        } else {
            a = m;
            fa = fm;
            fb *= 0.5;
        }
        if (b - a < 4e-16 * std::max(1.0, b)) break;
        // restore true end values for the next secant
        if (fm * best.residual != 0.0) { /* no-op, weights already applied */ }
    }
    if (std::fabs(best.residual) > ctl.shoot_tol)
        throw BracketError("solve_lambda: residual stalled at " +
                           std::to_string(best.residual));
    if (best.node_count() != k)
        throw NodalError("solve_lambda: converged to wrong nodal count");
    if (out_traj) *out_traj = best;
    return point_from(best);
}

namespace {

struct Probe {
    double lambda;
    bool valid = false;
    double residual = 0.0;
    int nodes = -1;
};

Probe probe_at(double lambda, double h, double radius, const TraceControls& ctl) {
    Probe p;
    p.lambda = lambda;
    if (!(lambda > 0.0)) return p;
    // the amplitude itself may sit below the barrier at this lambda
    if (!(1.0 + std::sqrt(lambda) * h > ctl.ode.barrier_floor)) return p;
    const ShotOutcome s = shoot_residual(lambda, h, radius, ctl.ode);
    if (s.barrier_hit) return p;
    p.valid = true;
    p.residual = s.residual;
    p.nodes = s.nodes;
    return p;
}

/// Find a sign-change bracket with node count k around a predicted lambda.
std::pair<double, double> establish_bracket(double pred, double width0, int k, double h,
                                            double radius, const TraceControls& ctl) {
    std::vector<Probe> probes;
    auto add = [&](double lam) {
        for (const Probe& q : probes)
            if (std::fabs(q.lambda - lam) < 1e-14 * std::max(1.0, lam)) return;
        probes.push_back(probe_at(lam, h, radius, ctl));
        std::sort(probes.begin(), probes.end(),
                  [](const Probe& x, const Probe& y) { return x.lambda < y.lambda; });
    };
    add(pred);
    if (h < 0.0) {
        // the admissible window ends at the barrier; the solution can hug it
        const double edge = std::pow(1.0 / std::fabs(h), 2);
        for (double frac : {0.999, 0.995, 0.98, 0.95})
            if (edge * frac > 0.0) add(edge * frac);
    }
    for (int j = 0; j < 10; ++j) {
        const double w = width0 * std::pow(2.0, j);
        add(pred - w);
        add(pred + w);
        for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
            const Probe& a = probes[i];
            const Probe& b = probes[i + 1];
            if (a.valid && b.valid && a.nodes == k && b.nodes == k &&
                a.residual * b.residual < 0.0)
                return {a.lambda, b.lambda};
        }
    }
    throw BracketError("establish_bracket: no admissible sign change near lambda = " +
                       std::to_string(pred));
}

}  // namespace

Branch trace_branch(int k, int sign, double radius, const TraceControls& ctl) {
    if (k < 1) throw std::invalid_argument("trace_branch: k >= 1 required");
    if (sign != +1 && sign != -1)
        throw std::invalid_argument("trace_branch: sign must be +1 or -1");

    const specfun::EigenTable table = specfun::build_eigen_table(radius, k);
    const double lambda_onset = table.mu_k(k) / 2.0;

    Branch br;
    br.k = k;
    br.sign = sign;

    double habs = ctl.h_min;
    double lam_pred = lambda_onset;
    double last_dlam = 0.025 * lambda_onset;
    int consecutive_failures = 0;
    double gap_target = 0.5;  // engaged near the barrier on the negative side

    while (static_cast<int>(br.points.size()) < ctl.max_points) {
        const double h = sign * habs;
        ode::RadialTrajectory traj;
        bool ok = false;
        try {
            const double width0 = std::max(4.0 * std::fabs(last_dlam), 1e-5 * lam_pred);
            const auto [lo, hi] = establish_bracket(lam_pred, width0, k, h, radius, ctl);
            BranchPoint pt = solve_lambda(k, h, lo, hi, radius, ctl, &traj);
            if (!(pt.lambda > 0.0))
                throw BracketError("trace_branch: nonpositive lambda");
            if (!br.points.empty()) last_dlam = pt.lambda - br.points.back().lambda;
            lam_pred = pt.lambda;
            if (ctl.keep_trajectories) {
                pt.trajectory_ref = static_cast<int>(br.trajectories.size());
                br.trajectories.push_back(std::move(traj));
            }
            br.points.push_back(std::move(pt));
            ok = true;
        } catch (const BracketError&) {
        } catch (const NodalError&) {
        }

        if (!ok) {
            if (++consecutive_failures >= 3) {
                // distinguish running out of admissible amplitudes from a
                // genuine continuation breakdown
                br.termination = (sign < 0 && 1.0 - std::sqrt(lam_pred) * habs < 5e-3)
                                     ? "barrier floor"
                                     : "step failure";
                break;
            }
            // retreat: geometric mean with the previous accepted amplitude
            const double prev = br.points.empty() ? ctl.h_min * 0.5
                                                  : std::fabs(br.points.back().h);
            habs = std::sqrt(habs * std::max(prev, 1e-12));
            continue;
        }
        consecutive_failures = 0;

        // next amplitude, with secant prediction for lambda
        const std::size_t n = br.points.size();
        double next = habs * ctl.step_ratio;
        if (n >= 2) {
            const BranchPoint& p1 = br.points[n - 2];
            const BranchPoint& p2 = br.points[n - 1];
            const double slope = (p2.lambda - p1.lambda) /
                                 (std::fabs(p2.h) - std::fabs(p1.h));
            lam_pred = p2.lambda + slope * (next - habs);
            if (!(lam_pred > 0.0)) lam_pred = p2.lambda;
        }
        if (sign > 0) {
            if (habs >= ctl.h_max) {
                br.termination = "amplitude cap";
                break;
            }
            habs = std::min(next, ctl.h_max);
        } else {
            // keep the initial gap 1 - sqrt(lambda) |h| positive, stepping the
            // gap down geometrically once the amplitude nears the barrier
            const double sql = std::sqrt(lam_pred);
            if (next * sql >= 1.0 - gap_target) {
                gap_target *= 0.5;
                if (gap_target < 1e-5) {
                    br.termination = "barrier floor";
                    break;
                }
                next = (1.0 - gap_target) / sql;
            }
            habs = next;
        }
    }
    if (br.termination.empty()) br.termination = "amplitude cap";

    if (br.points.size() >= 2) {
        const double h1 = std::fabs(br.points[0].h), l1 = br.points[0].lambda;
        const double h2 = std::fabs(br.points[1].h), l2 = br.points[1].lambda;
        br.origin_lambda = l1 - h1 * (l2 - l1) / (h2 - h1);
    } else if (!br.points.empty()) {
        br.origin_lambda = br.points[0].lambda;
    }

    br.asymptote_lambda = std::numeric_limits<double>::quiet_NaN();
    if (sign > 0 && br.points.size() >= 3) {
        const std::size_t n = br.points.size();
        const std::size_t tail = std::min<std::size_t>(8, n);
        std::vector<double> x, yv;
        for (std::size_t i = n - tail; i < n; ++i) {
            x.push_back(1.0 / br.points[i].sup_w);
            yv.push_back(br.points[i].lambda);
        }
        br.asymptote_lambda = polyfit(x, yv, 1)[0];
    }
    return br;
}

BlowupReport blowup_diagnostics(const Branch& branch) {
    if (branch.points.size() < 5)
        throw std::invalid_argument("blowup_diagnostics: need at least 5 branch points");
    if (branch.trajectories.size() != branch.points.size())
        throw std::invalid_argument("blowup_diagnostics: stored trajectories required");

    BlowupReport rep;
    for (std::size_t ip = 0; ip < branch.points.size(); ++ip) {
        const BranchPoint& pt = branch.points[ip];
        const ode::RadialTrajectory& traj = branch.trajectories[static_cast<std::size_t>(
            pt.trajectory_ref)];
        const double sql = std::sqrt(pt.lambda);

        std::vector<double> bounds = {0.0};
        bounds.insert(bounds.end(), pt.nodes.begin(), pt.nodes.end());
        bounds.push_back(traj.radius);

        double even_min_sup = std::numeric_limits<double>::infinity();
        double odd_max_gap = 0.0;
        double odd_max_len = 0.0;
        double global_min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
            const double a = bounds[i], b = bounds[i + 1];
            double wmax = -std::numeric_limits<double>::infinity();
            double wmin = std::numeric_limits<double>::infinity();
            constexpr int kSamples = 128;
            for (int j = 0; j <= kSamples; ++j) {
                const double w = traj.w_at(a + (b - a) * j / kSamples);
                wmax = std::max(wmax, w);
                wmin = std::min(wmin, w);
            }
            for (double rc : traj.crits)
                if (rc > a && rc < b) {
                    const double w = traj.w_at(rc);
                    wmax = std::max(wmax, w);
                    wmin = std::min(wmin, w);
                }
            global_min_gap = std::min(global_min_gap, 1.0 + sql * wmin);
            if (i % 2 == 0) even_min_sup = std::min(even_min_sup, wmax);
            else {
                odd_max_gap = std::max(odd_max_gap, 1.0 + sql * wmin);
                odd_max_len = std::max(odd_max_len, b - a);
            }
        }
        rep.sup_w.push_back(pt.sup_w);
        rep.inf_gap.push_back(global_min_gap);
        rep.even_min_sup.push_back(even_min_sup);
        rep.odd_max_gap.push_back(odd_max_gap);
        rep.odd_max_len.push_back(odd_max_len);
    }

    // orient all indicators to increase along a blow-up
    std::vector<std::vector<double>> oriented(5);
    oriented[0] = rep.sup_w;
    oriented[1] = rep.inf_gap;
    oriented[2] = rep.even_min_sup;
    oriented[3] = rep.odd_max_gap;
    oriented[4] = rep.odd_max_len;
    for (int idx : {1, 3, 4})
        for (double& v : oriented[static_cast<std::size_t>(idx)]) v = 1.0 / v;

    rep.tau.assign(5, std::vector<double>(5, 1.0));
    rep.tau_min = 1.0;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            const double t = kendall_tau(oriented[static_cast<std::size_t>(i)],
                                         oriented[static_cast<std::size_t>(j)]);
            rep.tau[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = t;
            rep.tau[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = t;
            rep.tau_min = std::min(rep.tau_min, t);
        }
    rep.concordant = rep.tau_min > 0.9;
    return rep;
}

DirichletScanReport dirichlet_scan(const DirichletScanParams& params) {
    if (!(params.lambda_min > 0.0 && params.lambda_max > params.lambda_min))
        throw std::invalid_argument("dirichlet_scan: invalid lambda range");
    if (params.n_lambda < 2 || params.n_h < 2)
        throw std::invalid_argument("dirichlet_scan: grid must be at least 2x2");

    DirichletScanReport rep;
    rep.params = params;
    rep.min_residual = std::numeric_limits<double>::infinity();
    rep.min_abs_w_end = std::numeric_limits<double>::infinity();

    const std::vector<double> lambdas =
        linspace(params.lambda_min, params.lambda_max, params.n_lambda);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> residual(
        static_cast<std::size_t>(params.n_lambda),
        std::vector<double>(static_cast<std::size_t>(params.n_h), nan));

    ode::IntegrateOptions opts;
    opts.tol = params.tol;

    std::mutex agg;
    int completed = 0, hits = 0, skipped = 0, errors = 0;
    parallel_for(static_cast<std::size_t>(params.n_lambda), [&](std::size_t i) {
        const double lambda = lambdas[i];
        const double h_lo =
            params.h_min ? *params.h_min : -0.9 / std::sqrt(lambda);
        const std::vector<double> hs = linspace(h_lo, params.h_max, params.n_h);
        int lcomp = 0, lhits = 0, lskip = 0, lerr = 0;
        double lmin = std::numeric_limits<double>::infinity();
        double lminw = std::numeric_limits<double>::infinity();
        double lmin_h = 0.0;
        for (std::size_t j = 0; j < hs.size(); ++j) {
            const double h = hs[j];
            if (std::fabs(h) < 1e-9) {  // trivial row
                ++lskip;
                continue;
            }
            if (!(1.0 + std::sqrt(lambda) * h > opts.barrier_floor)) {
                ++lskip;
                continue;
            }
            try {
                const ode::RadialTrajectory traj =
                    ode::integrate(lambda, h, params.radius, opts);
                const double wR = traj.w_at(params.radius);
                const double gap = 1.0 + std::sqrt(lambda) * wR;
                residual[i][j] = gap;
                ++lcomp;
                if (gap < lmin) {
                    lmin = gap;
                    lmin_h = h;
                }
                lminw = std::min(lminw, std::fabs(wR));
            } catch (const ode::BarrierHit&) {
                ++lhits;
            } catch (const std::exception&) {
                ++lerr;
            }
        }
        std::lock_guard<std::mutex> lock(agg);
        completed += lcomp;
        hits += lhits;
        skipped += lskip;
        errors += lerr;
        if (lmin < rep.min_residual) {
            rep.min_residual = lmin;
            rep.argmin_lambda = lambda;
            rep.argmin_h = lmin_h;
        }
        rep.min_abs_w_end = std::min(rep.min_abs_w_end, lminw);
    });
    rep.completed = completed;
    rep.barrier_hits = hits;
    rep.skipped_trivial = skipped;
    rep.errors = errors;

    for (int i = 0; i + 1 < params.n_lambda; ++i) {
        for (int j = 0; j + 1 < params.n_h; ++j) {
            const double c[4] = {residual[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                 residual[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)],
                                 residual[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)],
                                 residual[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)]};
            bool all_finite = true;
            double mn = std::numeric_limits<double>::infinity(), mx = -mn;
            for (double v : c) {
                if (std::isnan(v)) {
                    all_finite = false;
                    break;
                }
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            if (all_finite && mn <= 0.0 && mx >= 0.0) ++rep.solution_cells;
        }
    }
    return rep;
}

int multiplicity_count(const std::vector<Branch>& branches, double lambda) {
    int count = 0;
    for (const Branch& b : branches) {
        if (b.points.empty()) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const BranchPoint& p : b.points) {
            lo = std::min(lo, p.lambda);
            hi = std::max(hi, p.lambda);
        }
        if (lambda > lo && lambda < hi) ++count;
    }
    return count;
}

}  // namespace singbif::shooting
