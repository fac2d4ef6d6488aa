// Command-line front end: eigen tables, shooting, time maps, branch
// continuation, the inequality verifier, the Dirichlet scan, and the
// finite-dimensional bifurcation sandbox.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "singbif/estimates.hpp"
#include "singbif/io.hpp"
#include "singbif/radial_ode.hpp"
#include "singbif/sandbox.hpp"
#include "singbif/shooting.hpp"
#include "singbif/specfun.hpp"
#include "singbif/timemap.hpp"
#include "singbif/util.hpp"

using namespace singbif;

namespace {

struct GlobalArgs {
    std::string config_path;
    double radius = 1.0;
    double tol_ode = 1e-10, tol_quad = 1e-10, tol_shoot = 1e-9, tol_verify = 1e-7,
           tol_scan = 1e-8;
    std::string format = "csv";
    std::string out;
};

io::RunConfig resolve_config(const CLI::App& app, const GlobalArgs& g) {
    io::RunConfig cfg;
    if (!g.config_path.empty()) {
        const auto j = nlohmann::json::parse(io::read_file(g.config_path));
        io::apply_config_json(cfg, j);
    }
    const auto take = [&](const char* name, auto member, auto value) {
        if (app.count(name)) cfg.*member = value;
    };
    take("--radius", &io::RunConfig::radius, g.radius);
    take("--format", &io::RunConfig::format, g.format);
    take("--out", &io::RunConfig::out, g.out);
    if (app.count("--tol-ode")) cfg.tol.ode = g.tol_ode;
    if (app.count("--tol-quad")) cfg.tol.quadrature = g.tol_quad;
    if (app.count("--tol-shoot")) cfg.tol.shoot = g.tol_shoot;
    if (app.count("--tol-verify")) cfg.tol.verify = g.tol_verify;
    if (app.count("--tol-scan")) cfg.tol.scan = g.tol_scan;
    io::validate_config(cfg);
    return cfg;
}

void emit(const io::RunConfig& cfg, const std::string& content) {
    if (cfg.out.empty()) std::cout << content;
    else io::write_file(cfg.out, content);
}

std::string sidecar_path(const std::string& out, const char* ext) {
    const auto dot = out.rfind('.');
    if (dot == std::string::npos) return out + ext;
    return out.substr(0, dot) + ext;
}

shooting::TraceControls trace_controls(const io::RunConfig& cfg) {
    shooting::TraceControls ctl;
    ctl.shoot_tol = cfg.tol.shoot;
    ctl.ode.tol = cfg.tol.ode;
    ctl.h_min = cfg.h_min;
    ctl.h_max = cfg.h_max;
    return ctl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial bifurcation toolkit for the singular Neumann disk problem"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--radius", g.radius, "disk radius");
    app.add_option("--tol-ode", g.tol_ode, "ODE local error tolerance");
    app.add_option("--tol-quad", g.tol_quad, "quadrature relative tolerance");
    app.add_option("--tol-shoot", g.tol_shoot, "shooting residual tolerance");
    app.add_option("--tol-verify", g.tol_verify, "inequality margin slack");
    app.add_option("--tol-scan", g.tol_scan, "Dirichlet scan ODE tolerance");
    app.add_option("--format", g.format, "csv or json");
    app.add_option("--out", g.out, "output path (stdout when omitted)");

    // eigen
    auto* eigen_cmd = app.add_subcommand("eigen", "Neumann/Dirichlet eigenvalue table");
    int eigen_kmax = 10;
    eigen_cmd->add_option("--kmax", eigen_kmax, "number of modes");

    // shoot
    auto* shoot_cmd = app.add_subcommand("shoot", "integrate one radial trajectory");
    shoot_cmd->set_help_flag("--help", "print help");
    double sh_lambda = 7.0, sh_h = 0.1;
    shoot_cmd->add_option("--lambda", sh_lambda, "spectral parameter")->required();
    shoot_cmd->add_option("--h", sh_h, "initial amplitude w(0)")->required();
    double sh_tol = 0.0;
    shoot_cmd->add_option("--tol", sh_tol, "override ODE tolerance");

    // phi
    auto* phi_cmd = app.add_subcommand("phi", "time-map evaluation");
    phi_cmd->set_help_flag("--help", "print help");
    double ph_lambda = 1.0, ph_h = 1.0, ph_s = 0.0;
    bool ph_limits = false;
    phi_cmd->add_option("--lambda", ph_lambda, "spectral parameter")->required();
    phi_cmd->add_option("--h", ph_h, "turning value")->required();
    auto* ph_s_opt = phi_cmd->add_option("--s", ph_s, "evaluation point (default h)");
    phi_cmd->add_flag("--limits", ph_limits, "print analytic vs extrapolated limits");

    // branch
    auto* branch_cmd = app.add_subcommand("branch", "trace one nodal branch");
    int br_k = 1;
    std::string br_sign = "+";
    double br_hmax = 50.0;
    branch_cmd->add_option("--k", br_k, "node count")->required();
    branch_cmd->add_option("--sign", br_sign, "+ or -");
    branch_cmd->add_option("--hmax", br_hmax, "amplitude cap");

    // diagram
    auto* diag_cmd = app.add_subcommand("diagram", "bifurcation diagram (SVG + CSV)");
    int dg_kmax = 2;
    double dg_hmax = 50.0;
    diag_cmd->add_option("--kmax", dg_kmax, "trace k = 1..kmax");
    diag_cmd->add_option("--hmax", dg_hmax, "amplitude cap per branch");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "inequality suite on a branch file");
    std::string vf_branch, vf_report;
    verify_cmd->add_option("--branch", vf_branch, "branch CSV")->required();
    verify_cmd->add_option("--report", vf_report, "JSON report path");

    // dirichlet-scan
    auto* scan_cmd = app.add_subcommand("dirichlet-scan",
                                        "boundary-condition non-existence scan");
    double sc_lmin = 1.0, sc_lmax = 30.0, sc_hmin = 0.0, sc_hmax = 20.0;
    std::string sc_grid = "200x200";
    scan_cmd->add_option("--lambda-min", sc_lmin);
    scan_cmd->add_option("--lambda-max", sc_lmax);
    auto* sc_hmin_opt = scan_cmd->add_option("--h-min", sc_hmin,
                                             "fixed lower amplitude (default barrier-scaled)");
    scan_cmd->add_option("--h-max", sc_hmax);
    scan_cmd->add_option("--grid", sc_grid, "NxM");

    // sandbox
    auto* sb_cmd = app.add_subcommand("sandbox", "finite-dimensional two-branch engine");
    std::string sb_model = "default", sb_report;
    std::vector<double> sb_sweep;
    sb_cmd->add_option("--model", sb_model, "default | galerkin | file.json");
    sb_cmd->add_option("--rho-sweep", sb_sweep, "scales (default per model)")
        ->delimiter(',');
    sb_cmd->add_option("--report", sb_report, "JSON report path");

    CLI11_PARSE(app, argc, argv);

    try {
        const io::RunConfig cfg = resolve_config(app, g);

        if (*eigen_cmd) {
            const auto table = specfun::build_eigen_table(cfg.radius, eigen_kmax);
            emit(cfg, cfg.format == "json" ? io::eigen_table_json(table).dump(2) + "\n"
                                           : io::eigen_table_csv(table));
            return 0;
        }

        if (*shoot_cmd) {
            ode::IntegrateOptions opts;
            opts.tol = sh_tol > 0.0 ? sh_tol : cfg.tol.ode;
            try {
                const auto traj = ode::integrate(sh_lambda, sh_h, cfg.radius, opts);
                const std::string csv = io::trajectory_csv(traj);
                const std::string meta = io::trajectory_sidecar(traj).dump(2) + "\n";
                if (cfg.out.empty()) {
                    std::cout << csv << meta;
                } else {
                    io::write_file(cfg.out, csv);
                    io::write_file(cfg.out + ".json", meta);
                }
            } catch (const ode::BarrierHit& bh) {
                nlohmann::ordered_json j;
                j["barrier_hit"] = true;
                j["rho_reached"] = bh.rho_reached;
                emit(cfg, j.dump(2) + "\n");
            }
            return 0;
        }

        if (*phi_cmd) {
            nlohmann::ordered_json j;
            const double s = ph_s_opt->count() ? ph_s : ph_h;
            const auto ev = timemap::phi(ph_lambda, ph_h, s, cfg.tol.quadrature);
            j["lambda"] = ev.lambda;
            j["h"] = ev.h;
            j["s"] = ev.s;
            j["value"] = ev.value;
            j["err_est"] = ev.err_est;
            if (ph_limits) {
                const auto pr = timemap::extrapolate_limits(ph_lambda);
                nlohmann::ordered_json jl;
                jl["zero_plus"] = {{"analytic", pr.analytic.zero_plus},
                                   {"extrapolated", pr.zero_plus}};
                jl["infinity"] = {{"analytic", pr.analytic.infinity},
                                  {"extrapolated", pr.infinity}};
                jl["zero_minus"] = {{"analytic", pr.analytic.zero_minus},
                                    {"extrapolated", pr.zero_minus}};
                jl["barrier"] = {{"analytic", pr.analytic.barrier},
                                 {"extrapolated", pr.barrier}};
                j["limits"] = jl;
            }
            emit(cfg, j.dump(2) + "\n");
            return 0;
        }

        if (*branch_cmd) {
            if (br_sign != "+" && br_sign != "-")
                throw io::UsageError("branch: --sign must be + or -");
            auto ctl = trace_controls(cfg);
            ctl.h_max = br_hmax;
            const auto br =
                shooting::trace_branch(br_k, br_sign == "+" ? +1 : -1, cfg.radius, ctl);
            emit(cfg, io::branch_csv(br));
            std::cerr << "k=" << br_k << br_sign << ": " << br.points.size()
                      << " points, origin " << io::format_double(br.origin_lambda)
                      << ", asymptote " << io::format_double(br.asymptote_lambda)
                      << ", termination " << br.termination << "\n";
            return 0;
        }

        if (*diag_cmd) {
            if (cfg.out.empty()) throw io::UsageError("diagram: --out required");
            auto ctl = trace_controls(cfg);
            ctl.h_max = dg_hmax;
            std::vector<shooting::Branch> branches(static_cast<std::size_t>(dg_kmax));
            parallel_for(static_cast<std::size_t>(dg_kmax), [&](std::size_t i) {
                branches[i] =
                    shooting::trace_branch(static_cast<int>(i) + 1, +1, cfg.radius, ctl);
            });
            const auto table = specfun::build_eigen_table(cfg.radius, dg_kmax + 2);
            io::write_file(cfg.out, io::diagram_svg(branches, table));
            io::write_file(sidecar_path(cfg.out, ".csv"),
                           io::diagram_sidecar_csv(branches));
            return 0;
        }

        if (*verify_cmd) {
            const auto rows = io::parse_branch_csv(io::read_file(vf_branch));
            if (rows.empty()) throw io::UsageError("verify: empty branch file");
            auto ctl = trace_controls(cfg);
            std::map<int, estimates::LambdaBounds> bounds;
            nlohmann::ordered_json points = nlohmann::ordered_json::array();
            bool all_pass = true;
            for (const auto& row : rows) {
                if (!bounds.count(row.k))
                    bounds[row.k] = estimates::lambda_interval(cfg.radius, row.k);
                ode::RadialTrajectory traj =
                    ode::integrate(row.lambda, row.h, cfg.radius, ctl.ode);
                if (std::fabs(traj.residual) > 10.0 * ctl.shoot_tol) {
                    const double w = std::max(1e-6 * row.lambda, 1e-6);
                    shooting::solve_lambda(row.k, row.h, row.lambda - w, row.lambda + w,
                                           cfg.radius, ctl, &traj);
                }
                const auto rep =
                    estimates::verify_point(traj, &bounds[row.k], cfg.tol.verify);
                all_pass = all_pass && rep.pass;
                nlohmann::ordered_json jp = io::point_report_json(rep);
                jp["idx"] = row.idx;
                jp["h"] = row.h;
                jp["lambda"] = row.lambda;
                jp["k"] = row.k;
                points.push_back(jp);
                std::cout << "point " << row.idx << " (h=" << io::format_double(row.h)
                          << ", lambda=" << io::format_double(row.lambda) << "): "
                          << (rep.pass ? "pass" : "FAIL")
                          << " worst margin " << io::format_double(rep.worst_margin)
                          << "\n";
            }
            nlohmann::ordered_json j;
            j["pass"] = all_pass;
            j["points"] = points;
            if (!vf_report.empty()) io::write_file(vf_report, j.dump(2) + "\n");
            return all_pass ? 0 : 1;
        }

        if (*scan_cmd) {
            shooting::DirichletScanParams p;
            p.lambda_min = sc_lmin;
            p.lambda_max = sc_lmax;
            p.h_max = sc_hmax;
            p.radius = cfg.radius;
            p.tol = cfg.tol.scan;
            if (sc_hmin_opt->count()) p.h_min = sc_hmin;
            const auto x = sc_grid.find('x');
            if (x == std::string::npos)
                throw io::UsageError("dirichlet-scan: --grid must be NxM");
            p.n_lambda = std::stoi(sc_grid.substr(0, x));
            p.n_h = std::stoi(sc_grid.substr(x + 1));
            const auto rep = shooting::dirichlet_scan(p);
            emit(cfg, io::scan_report_json(rep).dump(2) + "\n");
            return 0;
        }

        if (*sb_cmd) {
            sandbox::SandboxModel model;
            if (sb_model == "default") model = sandbox::make_default_model();
            else if (sb_model == "galerkin")
                model = sandbox::make_galerkin_model(cfg.radius);
            else
                model = io::load_sandbox_model(
                    nlohmann::json::parse(io::read_file(sb_model)));
            const std::vector<double> sweep =
                sb_sweep.empty() ? model.default_sweep : sb_sweep;
            const auto rep = sandbox::run_sweep(model, sweep);
            const std::string text = io::sweep_report_json(rep).dump(2) + "\n";
            if (!sb_report.empty()) io::write_file(sb_report, text);
            else emit(cfg, text);
            return 0;
        }
    } catch (const io::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
