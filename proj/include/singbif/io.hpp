#ifndef SINGBIF_IO_HPP
#define SINGBIF_IO_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "singbif/estimates.hpp"
#include "singbif/radial_ode.hpp"
#include "singbif/sandbox.hpp"
#include "singbif/shooting.hpp"
#include "singbif/specfun.hpp"

namespace singbif::io {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ToleranceSet {
    double ode = 1e-10;
    double quadrature = 1e-10;
    double shoot = 1e-9;
    double verify = 1e-7;
    double scan = 1e-8;
};

struct RunConfig {
    double radius = 1.0;
    ToleranceSet tol;
    int kmax = 10;
    double h_min = 1e-4;
    double h_max = 50.0;
    int grid_n = 200;
    int grid_m = 200;
    std::string format = "csv";  // csv | json
    std::string out;
};

/// Applies a JSON config object onto cfg; unknown keys raise UsageError
/// naming the key. Recognized keys: radius, kmax, h_min, h_max, grid_n,
/// grid_m, format, out, tol_ode, tol_quadrature, tol_shoot, tol_verify,
/// tol_scan.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);
void validate_config(const RunConfig& cfg);

/// Canonical float formatting shared by every writer (15 significant digits,
/// '.' decimal, no locale).
std::string format_double(double v);

std::string eigen_table_csv(const specfun::EigenTable& t);
nlohmann::ordered_json eigen_table_json(const specfun::EigenTable& t);

std::string trajectory_csv(const ode::RadialTrajectory& t);
nlohmann::ordered_json trajectory_sidecar(const ode::RadialTrajectory& t);

std::string branch_csv(const shooting::Branch& b);
struct BranchRow {
    int idx = 0;
    double h = 0.0, lambda = 0.0;
    int k = 0;
    double sup_w = 0.0, inf_w = 0.0, barrier_gap = 0.0;
    std::vector<double> nodes;
};
std::vector<BranchRow> parse_branch_csv(const std::string& text);

/// Deterministic 800x600 bifurcation diagram: one polyline per branch
/// (x = lambda, y = sup |w|), dashed onset guides at mu_k/2 and asymptote
/// guides at mu_{k/2} / nu_{(k+1)/2}, with a legend.
std::string diagram_svg(const std::vector<shooting::Branch>& branches,
                        const specfun::EigenTable& table);
std::string diagram_sidecar_csv(const std::vector<shooting::Branch>& branches);

nlohmann::ordered_json scan_report_json(const shooting::DirichletScanReport& rep);
nlohmann::ordered_json sweep_report_json(const sandbox::SweepReport& rep);
nlohmann::ordered_json point_report_json(const estimates::PointReport& rep);

sandbox::SandboxModel load_sandbox_model(const nlohmann::json& j);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace singbif::io

#endif
