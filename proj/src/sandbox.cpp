#include "singbif/sandbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "singbif/specfun.hpp"

namespace singbif::sandbox {

namespace {

constexpr double kEigenClusterTol = 1e-8;

std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b) {
    // Newton on P_n with cos initial guesses; classic Golub-free construction.
    std::vector<std::pair<double, double>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        out[static_cast<std::size_t>(n - 1 - i)] = {0.5 * (b - a) * x + 0.5 * (a + b),
                                                    0.5 * (b - a) * w};
    }
    return out;
}

}  // namespace

void finalize_model(SandboxModel& model) {
    if (model.n < 2) throw std::invalid_argument("sandbox model: dimension >= 2 required");
    if (model.K.rows() != model.n || model.K.cols() != model.n)
        throw std::invalid_argument("sandbox model: K must be n x n");
    if (model.W.size() == 0) model.W = Mat::Identity(model.n, model.n);
    if (!model.K.isApprox(model.K.transpose(), 1e-12))
        throw std::invalid_argument("sandbox model: K must be symmetric");

    Eigen::SelfAdjointEigenSolver<Mat> es(model.K);
    model.evals = es.eigenvalues();
    model.evecs = es.eigenvectors();

    const double tol = kEigenClusterTol * std::max(1.0, std::fabs(model.lambda_hat));
    model.idx1.clear();
    model.idx2.clear();
    model.idx3.clear();
    for (int j = 0; j < model.n; ++j) {
        const double lj = model.evals(j);
        if (std::fabs(lj - model.lambda_hat) <= tol) model.idx2.push_back(j);
        else if (lj < model.lambda_hat) model.idx1.push_back(j);
        else model.idx3.push_back(j);
    }
    if (model.idx2.empty())
        throw std::invalid_argument("sandbox model: lambda_hat is not an eigenvalue");
    model.lambda_below = model.idx1.empty() ? -std::numeric_limits<double>::infinity()
                                            : model.evals(model.idx1.back());
    model.lambda_above = model.idx3.empty() ? std::numeric_limits<double>::infinity()
                                            : model.evals(model.idx3.front());

    Mat v2(model.n, static_cast<int>(model.idx2.size()));
    for (std::size_t c = 0; c < model.idx2.size(); ++c)
        v2.col(static_cast<int>(c)) = model.evecs.col(model.idx2[c]);
    model.P2 = v2 * v2.transpose();
    model.P13 = Mat::Identity(model.n, model.n) - model.P2;

    if (!(model.delta > 0.0 && model.delta <= 0.125 + 1e-12))
        throw std::invalid_argument("sandbox model: delta must lie in (0, 1/8]");
    if (!(model.eps0 > 0.0))
        throw std::invalid_argument("sandbox model: eps0 > 0 required");
    const double gap_lo = model.lambda_hat - model.lambda_below;
    const double gap_hi = model.lambda_above - model.lambda_hat;
    if (!(5.0 * model.eps0 < std::min(gap_lo, gap_hi)))
        throw std::invalid_argument("sandbox model: 5 eps0 must fit in the spectral gap");
    if (std::isfinite(gap_lo) && !(model.delta * model.delta * gap_lo <= model.eps0))
        throw std::invalid_argument("sandbox model: delta^2 gap exceeds eps0");
}

SandboxModel make_default_model() {
    SandboxModel m;
    m.name = "default";
    m.n = 5;
    m.K = Mat::Zero(5, 5);
    m.K.diagonal() << 1.0, 2.0, 2.0, 5.0, 9.0;
    m.lambda_hat = 2.0;
    m.delta = 0.125;
    m.eps0 = 0.15;
    m.nu = 1.0;
    m.m_coerc = 0.0;
    m.H.value = [](const Vec& u) { return 0.25 * u.array().pow(4).sum(); };
    m.H.grad = [](const Vec& u) { return Vec(u.array().cube()); };
    m.H1.value = [](const Vec& u) { return -u.array().pow(6).sum() / 6.0; };
    m.H1.grad = [](const Vec& u) { return Vec(-u.array().pow(5)); };
    finalize_model(m);
    return m;
}

namespace {

// cutoff nonlinearity of the transformed disk problem at lambda = 1
struct CutoffPotential {
    double s0 = 0.2;

    double eta(double t) const {
        const double a = std::fabs(t);
        if (a <= s0) return 1.0;
        if (a >= 2.0 * s0) return 0.0;
        const double x = (a - s0) / s0;
        return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    }
    double h1(double s) const { return s * s / (1.0 + s); }
    double h1_cut(double s) const {
        return std::fabs(s) >= 2.0 * s0 ? 0.0 : eta(s) * h1(s);
    }
    static double primitive(double s) {  // int_0^s h1, |s| < 1
        return 0.5 * s * s - s + std::log1p(s);
    }
    double primitive_cut(double s) const {
        const double sgn = s >= 0.0 ? 1.0 : -1.0;
        const double a = std::fabs(s);
        double out = primitive(sgn * std::min(a, s0));
        if (a > s0) {
            const double hi = std::min(a, 2.0 * s0);
            for (const auto& [x, w] : gauss_legendre(16, s0, hi))
                out += sgn * w * h1_cut(sgn * x);
        }
        return out;
    }
};

struct GalerkinContext {
    CutoffPotential cutoff;
    std::vector<double> rho_nodes, rho_weights;
    Mat basis;  // modes x nodes
};

}  // namespace

SandboxModel make_galerkin_model(double radius, int modes) {
    if (modes < 3) throw std::invalid_argument("galerkin model: need at least 3 modes");
    SandboxModel m;
    m.name = "galerkin";
    m.n = modes;

    const specfun::EigenTable table = specfun::build_eigen_table(radius, modes - 1);
    m.K = Mat::Zero(modes, modes);
    for (int k = 1; k < modes; ++k) m.K(k, k) = table.mu_k(k);
    m.lambda_hat = table.mu_k(1);
    m.delta = 0.125;
    m.eps0 = 2.0;
    m.nu = 0.5;
    m.m_coerc = 0.5;
    m.W = Mat::Identity(modes, modes) + m.K;  // strong Gram: mass + stiffness
    // the basis peaks near 3.5 at the center, so pointwise amplitudes run
    // ~5 rho; keep the sweep below the cutoff scale
    m.default_sweep = {0.02, 0.01, 0.005, 0.002};

    auto ctx = std::make_shared<GalerkinContext>();
    const auto rule = gauss_legendre(64, 0.0, radius);
    ctx->basis = Mat(modes, static_cast<int>(rule.size()));
    ctx->rho_nodes.reserve(rule.size());
    ctx->rho_weights.reserve(rule.size());
    const double n0 = radius / std::sqrt(2.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto [x, w] = rule[q];
        ctx->rho_nodes.push_back(x);
        ctx->rho_weights.push_back(w);
        ctx->basis(0, static_cast<int>(q)) = 1.0 / n0;
        for (int k = 1; k < modes; ++k) {
            const double nk = n0 * std::fabs(specfun::bessel_j0(table.y[static_cast<std::size_t>(k - 1)]));
            ctx->basis(k, static_cast<int>(q)) =
                specfun::bessel_j0(table.y[static_cast<std::size_t>(k - 1)] * x / radius) / nk;
        }
    }

    // weak-equation recovery -laplace(v) = mu (v - h1(v)/2) requires the
    // potential -1/2 int of the cutoff primitive
    m.H1.value = [ctx](const Vec& c) {
        double acc = 0.0;
        const Vec vals = ctx->basis.transpose() * c;
        for (std::size_t q = 0; q < ctx->rho_nodes.size(); ++q)
            acc += ctx->rho_weights[q] * ctx->rho_nodes[q] *
                   ctx->cutoff.primitive_cut(vals(static_cast<int>(q)));
        return -0.5 * acc;
    };
    m.H1.grad = [ctx](const Vec& c) {
        const Vec vals = ctx->basis.transpose() * c;
        Vec wvec(vals.size());
        for (std::size_t q = 0; q < ctx->rho_nodes.size(); ++q)
            wvec(static_cast<int>(q)) = ctx->rho_weights[q] * ctx->rho_nodes[q] *
                                        ctx->cutoff.h1_cut(vals(static_cast<int>(q)));
        return Vec(-0.5 * (ctx->basis * wvec));
    };

    finalize_model(m);
    return m;
}

Functionals scaled_functionals(const SandboxModel& model, double rho, const Vec& u) {
    if (rho < 0.0 || rho > 1.0)
        throw std::invalid_argument("scaled_functionals: rho in [0, 1] required");
    Functionals out;
    out.f = 0.5 * u.dot(model.K * u);
    out.g = 0.5 * u.squaredNorm();
    out.grad_f = model.K * u;
    out.grad_g = u;
    if (rho > 0.0) {
        if (model.H) {
            out.f += model.H.value(rho * u) / (rho * rho);
            out.grad_f += model.H.grad(rho * u) / rho;
        }
        if (model.H1) {
            out.g += model.H1.value(rho * u) / (rho * rho);
            out.grad_g += model.H1.grad(rho * u) / rho;
        }
    }
    return out;
}

Projection sphere_project(const SandboxModel& model, double rho, const Vec& u) {
    const Vec p2 = model.pi2(u);
    const double np2 = p2.norm();
    if (!(np2 >= model.delta * (1.0 - 1e-9)))
        throw std::invalid_argument("sphere_project: point outside the collar");
    const Vec base = model.delta / np2 * p2;
    const Vec dir = u - base;

    const auto gval = [&](double t) -> double {
        return scaled_functionals(model, rho, base + t * dir).g;
    };
    const double glo = gval(0.5), ghi = gval(2.0);
    if (!(glo < 1.0 && ghi > 1.0))
        throw std::runtime_error(
            "sphere_project: regime violated (rho too large for this collar point)");

    double lo = 0.5, hi = 2.0, t = 1.0;
    for (int it = 0; it < 40; ++it) {
        t = 0.5 * (lo + hi);
        if (gval(t) < 1.0) lo = t;
        else hi = t;
    }
    for (int it = 0; it < 8; ++it) {
        const Functionals f = scaled_functionals(model, rho, base + t * dir);
        const double slope = f.grad_g.dot(dir);
        if (!(slope > 0.0)) break;
        const double tn = t - (f.g - 1.0) / slope;
        if (!(tn > lo && tn < hi)) break;
        t = tn;
        if (std::fabs(f.g - 1.0) < 1e-14) break;
    }
    const double fd_slope = (gval(t + 1e-6) - gval(t - 1e-6)) / 2e-6;
    if (!(fd_slope >= 0.125 * 0.999))
        throw std::runtime_error("sphere_project: contraction slope below 1/8");
    Projection pr;
    pr.t_bar = t;
    pr.point = base + t * dir;
    return pr;
}

namespace {

Vec clamp_collar(const SandboxModel& m, const Vec& u, bool boundary) {
    const Vec p2 = m.pi2(u);
    const double np2 = p2.norm();
    const double target = boundary ? m.delta : std::max(np2, m.delta * (1.0 + 1e-9));
    if (np2 < 1e-14) throw std::runtime_error("collar clamp: degenerate projection");
    if (boundary || np2 < target) return m.pi13(u) + target / np2 * p2;
    return u;
}

Mat subspace_mask(const SandboxModel& m, bool with_x1, bool with_x3) {
    Mat p = m.P2;
    if (with_x1)
        for (int j : m.idx1) p += m.evecs.col(j) * m.evecs.col(j).transpose();
    if (with_x3)
        for (int j : m.idx3) p += m.evecs.col(j) * m.evecs.col(j).transpose();
    return p;
}

struct OptSetup {
    double rho = 0.0;
    Mat mask;       // orthogonal projector onto the allowed eigen-subspace
    bool boundary = false;
    int sign = -1;  // -1 minimize, +1 maximize
};

struct OptResult {
    Vec u;
    double f = 0.0;
};

OptResult optimize_on_manifold(const SandboxModel& m, const OptSetup& s, Vec u,
                               int max_iter = 4000) {
    u = s.mask * u;
    u = clamp_collar(m, u, s.boundary);
    u = sphere_project(m, s.rho, u).point;
    Functionals cur = scaled_functionals(m, s.rho, u);
    double alpha = 0.25;
    for (int it = 0; it < max_iter; ++it) {
        Vec d = s.mask * cur.grad_f;
        const Vec gg = s.mask * cur.grad_g;
        const double gg2 = gg.squaredNorm();
        if (gg2 > 0.0) d -= d.dot(gg) / gg2 * gg;
        if (s.boundary) {
            const Vec n2 = m.pi2(u);
            const double n22 = n2.squaredNorm();
            if (n22 > 0.0) d -= d.dot(n2) / n22 * n2;
        }
        const double dn = d.norm();
        if (dn <= 1e-11 * std::max(1.0, cur.grad_f.norm())) break;

        bool moved = false;
        alpha = std::min(1.0, alpha * 4.0);
        while (alpha > 1e-14) {
            Vec cand = u + s.sign * alpha * d;
            try {
                cand = clamp_collar(m, s.mask * cand, s.boundary);
                cand = sphere_project(m, s.rho, cand).point;
                const Functionals fc = scaled_functionals(m, s.rho, cand);
                if (s.sign * (fc.f - cur.f) > 0.0) {
                    u = cand;
                    cur = fc;
                    moved = true;
                    break;
                }
            } catch (const std::exception&) {
                // regime or collar failure at this step size; shrink
            }
            alpha *= 0.5;
        }
        if (!moved) break;
    }
    return {u, cur.f};
}

struct KktResult {
    Vec u;
    double lambda = 0.0;
    double residual = 0.0;
    bool ok = false;
};

KktResult kkt_polish(const SandboxModel& m, double rho, Vec u) {
    const int n = m.n;
    const auto residual_vec = [&](const Vec& x, double lam) -> Vec {
        const Functionals f = scaled_functionals(m, rho, x);
        Vec r(n + 1);
        r.head(n) = f.grad_f - lam * f.grad_g;
        r(n) = f.g - 1.0;
        return r;
    };
    Functionals f0 = scaled_functionals(m, rho, u);
    double lam = f0.grad_f.dot(f0.grad_g) / f0.grad_g.squaredNorm();

    Vec r = residual_vec(u, lam);
    for (int it = 0; it < 60 && r.norm() > 1e-12; ++it) {
        Mat jac(n + 1, n + 1);
        const double base_step = 1e-7;
        for (int c = 0; c < n; ++c) {
            const double step = base_step * std::max(1.0, std::fabs(u(c)));
            Vec up = u;
            up(c) += step;
            jac.col(c) = (residual_vec(up, lam) - r) / step;
        }
        jac.col(n) = (residual_vec(u, lam + base_step) - r) / base_step;
        const Vec delta = jac.fullPivLu().solve(-r);
        double damp = 1.0;
        for (int ls = 0; ls < 20; ++ls) {
            const Vec un = u + damp * delta.head(n);
            const double ln = lam + damp * delta(n);
            const Vec rn = residual_vec(un, ln);
            if (rn.norm() < r.norm()) {
                u = un;
                lam = ln;
                r = rn;
                break;
            }
            damp *= 0.5;
        }
        if (damp < 1e-6) break;
    }
    KktResult out;
    out.u = u;
    out.lambda = lam;
    out.residual = r.norm();
    out.ok = out.residual <= 1e-8 && m.pi2(u).norm() >= m.delta;
    return out;
}

std::vector<Vec> x2_seeds(const SandboxModel& m) {
    std::vector<Vec> seeds;
    const int d2 = static_cast<int>(m.idx2.size());
    const Vec e0 = m.evecs.col(m.idx2[0]);
    if (d2 == 1) {
        seeds.push_back(std::sqrt(2.0) * e0);
        seeds.push_back(-std::sqrt(2.0) * e0);
    } else {
        const Vec e1 = m.evecs.col(m.idx2[1]);
        for (int j = 0; j < 8; ++j) {
            const double th = 2.0 * M_PI * j / 8.0;
            seeds.push_back(std::sqrt(2.0) * (std::cos(th) * e0 + std::sin(th) * e1));
        }
    }
    return seeds;
}

CriticalPair pair_from(const SandboxModel& m, double rho, const KktResult& k) {
    CriticalPair p;
    p.u = k.u;
    p.lambda = k.lambda;
    p.mu = 0.0;
    p.rho = rho;
    p.kkt_residual = k.residual;
    p.f_val = scaled_functionals(m, rho, k.u).f;
    return p;
}

}  // namespace

std::pair<CriticalPair, CriticalPair> find_critical_pairs(const SandboxModel& model,
                                                          double rho) {
    // In the full space the pair are saddles (the X1 directions carry lower
    // eigenvalues); f is genuinely minimized near the degenerate sphere only
    // within X2 + X3, so descend there and let the Newton polish pick up the
    // X1 corrections.
    OptSetup subspace_min;
    subspace_min.rho = rho;
    subspace_min.mask = subspace_mask(model, false, true);
    subspace_min.boundary = false;
    subspace_min.sign = -1;

    OptResult best;
    best.f = std::numeric_limits<double>::infinity();
    for (const Vec& seed : x2_seeds(model)) {
        try {
            const OptResult r = optimize_on_manifold(model, subspace_min, seed);
            if (r.f < best.f) best = r;
        } catch (const std::exception&) {
        }
    }
    if (!std::isfinite(best.f))
        throw std::runtime_error("find_critical_pairs: no admissible start converged");
    KktResult k1 = kkt_polish(model, rho, best.u);
    if (!k1.ok)
        throw std::runtime_error("find_critical_pairs: first point failed to polish, residual " +
                                 std::to_string(k1.residual));

    KktResult k2;
    const int d2 = static_cast<int>(model.idx2.size());
    if (d2 == 1) {
        // the collar is disconnected; the second point minimizes on the
        // opposite sheet
        Vec seed = k1.u - 2.0 * model.pi2(k1.u);
        const OptResult r = optimize_on_manifold(model, subspace_min, seed);
        k2 = kkt_polish(model, rho, r.u);
    } else {
        // mountain-pass: rotate the degenerate component toward its antipode,
        // dyadically refine the path maximum, then polish
        const Vec p2 = model.pi2(k1.u);
        const double np2 = p2.norm();
        const Vec om0 = p2 / np2;
        Vec om1 = model.evecs.col(model.idx2[0]);
        if (std::fabs(om1.dot(om0)) > 0.9) om1 = model.evecs.col(model.idx2[1]);
        om1 = (om1 - om1.dot(om0) * om0).normalized();
        const Vec fixed = model.pi13(k1.u);

        const auto path_point = [&](double theta) -> Vec {
            const Vec raw =
                fixed + np2 * (std::cos(theta) * om0 + std::sin(theta) * om1);
            return sphere_project(model, rho, raw).point;
        };
        const auto path_f = [&](double theta) {
            return scaled_functionals(model, rho, path_point(theta)).f;
        };
        int jmax = 0;
        double fmax = -std::numeric_limits<double>::infinity();
        constexpr int kPath = 64;
        for (int j = 0; j <= kPath; ++j) {
            const double f = path_f(M_PI * j / kPath);
            if (f > fmax) {
                fmax = f;
                jmax = j;
            }
        }
        double tlo = M_PI * std::max(0, jmax - 1) / kPath;
        double thi = M_PI * std::min(kPath, jmax + 1) / kPath;
        double tmid = M_PI * jmax / kPath;
        for (int it = 0; it < 24; ++it) {
            const double t1 = 0.5 * (tlo + tmid), t2 = 0.5 * (tmid + thi);
            const double f1 = path_f(t1), fm = path_f(tmid), f2 = path_f(t2);
            if (f1 >= fm && f1 >= f2) { thi = tmid; tmid = t1; }
            else if (f2 >= fm && f2 >= f1) { tlo = tmid; tmid = t2; }
            else { tlo = t1; thi = t2; }
        }
        k2 = kkt_polish(model, rho, path_point(tmid));
        if (!k2.ok || (k2.u - k1.u).norm() < 1e-6) {
            Vec seed = k1.u - 2.0 * model.pi2(k1.u);
            const OptResult r = optimize_on_manifold(model, subspace_min, seed);
            k2 = kkt_polish(model, rho, r.u);
        }
    }
    if (!k2.ok)
        throw std::runtime_error("find_critical_pairs: second point failed to polish");
    if ((k2.u - k1.u).norm() < 1e-6)
        throw std::runtime_error("find_critical_pairs: points not distinct");

    CriticalPair p1 = pair_from(model, rho, k1);
    CriticalPair p2 = pair_from(model, rho, k2);
    if (p2.f_val < p1.f_val) std::swap(p1, p2);
    return {p1, p2};
}

bool boundary_exclusion_check(const SandboxModel& model, double /*rho*/,
                              const CriticalPair& pair) {
    return model.pi2(pair.u).norm() > model.delta + 1e-9 && pair.mu == 0.0;
}

namespace {

std::vector<Vec> complement_seeds(const SandboxModel& m, const std::vector<int>& comp) {
    // boundary-style seeds: degenerate part pinned at delta, remainder in the
    // complementary subspace sized to ||u|| = sqrt(2)
    std::vector<Vec> seeds;
    const double c = std::sqrt(2.0 - m.delta * m.delta);
    for (const Vec& tau : x2_seeds(m)) {
        const Vec t2 = m.delta / std::sqrt(2.0) * tau;
        if (comp.empty()) {
            seeds.push_back(t2);
            continue;
        }
        for (int j : comp) {
            seeds.push_back(t2 + c * m.evecs.col(j));
            seeds.push_back(t2 - c * m.evecs.col(j));
        }
    }
    return seeds;
}

double run_bound(const SandboxModel& m, double rho, bool with_x1, bool boundary,
                 int sign) {
    OptSetup s;
    s.rho = rho;
    s.mask = subspace_mask(m, with_x1, !with_x1);
    s.boundary = boundary;
    s.sign = sign;
    const std::vector<int>& comp = with_x1 ? m.idx1 : m.idx3;
    double best = sign > 0 ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    std::vector<Vec> seeds = complement_seeds(m, comp);
    if (!boundary)
        for (const Vec& tau : x2_seeds(m)) seeds.push_back(tau);
    for (const Vec& seed : seeds) {
        try {
            const OptResult r = optimize_on_manifold(m, s, seed);
            best = sign > 0 ? std::max(best, r.f) : std::min(best, r.f);
        } catch (const std::exception&) {
        }
    }
    if (!std::isfinite(best))
        throw std::runtime_error("level bound optimization failed to produce a value");
    return best;
}

}  // namespace

LevelBounds level_bounds(const SandboxModel& model, double rho) {
    LevelBounds b;
    b.a_prime = run_bound(model, rho, true, true, +1);
    b.a_dprime = run_bound(model, rho, false, false, -1);
    b.b_prime = run_bound(model, rho, true, false, +1);
    b.b_dprime = run_bound(model, rho, false, true, -1);
    return b;
}

std::pair<double, double> level_bounds_quadratic(const SandboxModel& model) {
    const double d2 = model.delta * model.delta;
    const double a0 =
        model.lambda_below + 0.5 * d2 * (model.lambda_hat - model.lambda_below);
    const double b0 =
        model.lambda_above - 0.5 * d2 * (model.lambda_above - model.lambda_hat);
    return {a0, b0};
}

std::pair<double, double> correction_terms(const SandboxModel& model, double rho,
                                           const Vec& u) {
    if (rho == 0.0) return {0.0, 0.0};
    double c1 = 0.0, c2 = 0.0;
    if (model.H) {
        const double hval = model.H.value(rho * u) / (rho * rho);
        const Vec hgrad = model.H.grad(rho * u) / rho;
        c1 = hval - 0.5 * hgrad.dot(u);
    }
    if (model.H1) {
        const double h1val = model.H1.value(rho * u) / (rho * rho);
        const Vec h1grad = model.H1.grad(rho * u) / rho;
        c2 = 0.5 * h1grad.dot(u) - h1val;
    }
    return {c1, c2};
}

double largest_regime_rho(const SandboxModel& model,
                          const std::vector<double>& candidates) {
    std::vector<Vec> samples;
    const std::vector<Vec> taus = x2_seeds(model);
    std::vector<int> comp = model.idx1;
    comp.insert(comp.end(), model.idx3.begin(), model.idx3.end());
    for (double r : {1.05, 1.4, 1.8, 1.95}) {
        for (const Vec& tau : taus) {
            const Vec t2u = tau / tau.norm();
            for (double a : {model.delta * 1.001, 0.7 * r, 0.99 * r}) {
                if (a > r) continue;
                const double b = std::sqrt(std::max(0.0, r * r - a * a));
                if (comp.empty()) {
                    samples.push_back(a * t2u);
                    continue;
                }
                samples.push_back(a * t2u + b * model.evecs.col(comp.front()));
                samples.push_back(a * t2u - b * model.evecs.col(comp.back()));
            }
        }
    }
    double best = 0.0;
    for (double rho : candidates) {
        bool ok = true;
        for (const Vec& u : samples) {
            try {
                sphere_project(model, rho, u);
            } catch (const std::exception&) {
                ok = false;
                break;
            }
        }
        if (ok) best = std::max(best, rho);
    }
    return best;
}

SweepReport run_sweep(const SandboxModel& model, const std::vector<double>& rhos) {
    SweepReport rep;
    rep.model = model.name;
    rep.lambda_hat = model.lambda_hat;
    const auto closed = level_bounds_quadratic(model);
    rep.a_prime0_closed = closed.first;
    rep.b_dprime0_closed = closed.second;
    const LevelBounds lb0 = level_bounds(model, 0.0);
    rep.a_prime0_optimized = lb0.a_prime;
    rep.b_dprime0_optimized = lb0.b_dprime;
    rep.largest_regime_rho = largest_regime_rho(model, {0.5, 0.4, 0.3, 0.25, 0.2, 0.15,
                                                        0.1, 0.05, 0.02});
    for (double rho : rhos) {
        SweepEntry e;
        e.rho = rho;
        auto [p1, p2] = find_critical_pairs(model, rho);
        e.first = p1;
        e.second = p2;
        e.bounds = level_bounds(model, rho);
        e.exclusion_first = boundary_exclusion_check(model, rho, p1);
        e.exclusion_second = boundary_exclusion_check(model, rho, p2);
        std::tie(e.c1_first, e.c2_first) = correction_terms(model, rho, p1.u);
        std::tie(e.c1_second, e.c2_second) = correction_terms(model, rho, p2.u);
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace singbif::sandbox
