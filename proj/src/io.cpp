#include "singbif/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace singbif::io {

namespace {

std::string join_doubles(const std::vector<double>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += format_double(v[i]);
    }
    return out;
}

const char* case_name(ode::SegmentCase c) {
    switch (c) {
        case ode::SegmentCase::A: return "A";
        case ode::SegmentCase::B: return "B";
        case ode::SegmentCase::C: return "C";
        default: return "D";
    }
}

// nice tick spacing covering [lo, hi] with ~n intervals
std::vector<double> nice_ticks(double lo, double hi, int n) {
    if (!(hi > lo)) hi = lo + 1.0;
    const double raw = (hi - lo) / std::max(1, n);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> ticks;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 1e-12 * step; t += step) ticks.push_back(t == 0.0 ? 0.0 : t);
    return ticks;
}

std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("config: top-level JSON object expected");
    for (const auto& [key, val] : j.items()) {
        if (key == "radius") cfg.radius = val.get<double>();
        else if (key == "kmax") cfg.kmax = val.get<int>();
        else if (key == "h_min") cfg.h_min = val.get<double>();
        else if (key == "h_max") cfg.h_max = val.get<double>();
        else if (key == "grid_n") cfg.grid_n = val.get<int>();
        else if (key == "grid_m") cfg.grid_m = val.get<int>();
        else if (key == "format") cfg.format = val.get<std::string>();
        else if (key == "out") cfg.out = val.get<std::string>();
        else if (key == "tol_ode") cfg.tol.ode = val.get<double>();
        else if (key == "tol_quadrature") cfg.tol.quadrature = val.get<double>();
        else if (key == "tol_shoot") cfg.tol.shoot = val.get<double>();
        else if (key == "tol_verify") cfg.tol.verify = val.get<double>();
        else if (key == "tol_scan") cfg.tol.scan = val.get<double>();
        else throw UsageError("config: unknown key '" + key + "'");
    }
}

void validate_config(const RunConfig& cfg) {
    if (!(cfg.radius > 0.0)) throw UsageError("config: radius must be > 0");
    if (!(cfg.tol.ode > 0.0)) throw UsageError("config: tol_ode must be > 0");
    if (!(cfg.tol.quadrature > 0.0)) throw UsageError("config: tol_quadrature must be > 0");
    if (!(cfg.tol.shoot > 0.0)) throw UsageError("config: tol_shoot must be > 0");
    if (!(cfg.tol.verify > 0.0)) throw UsageError("config: tol_verify must be > 0");
    if (!(cfg.tol.scan > 0.0)) throw UsageError("config: tol_scan must be > 0");
    if (cfg.kmax < 1) throw UsageError("config: kmax must be >= 1");
    if (cfg.format != "csv" && cfg.format != "json")
        throw UsageError("config: format must be csv or json");
}

std::string eigen_table_csv(const specfun::EigenTable& t) {
    std::string out = "k,y_k,z_k,mu_k,nu_k\n";
    for (int k = 1; k <= t.kmax; ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(t.y[static_cast<std::size_t>(k - 1)]);
        out += ',';
        out += format_double(t.z[static_cast<std::size_t>(k - 1)]);
        out += ',';
        out += format_double(t.mu[static_cast<std::size_t>(k - 1)]);
        out += ',';
        out += format_double(t.nu[static_cast<std::size_t>(k - 1)]);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json eigen_table_json(const specfun::EigenTable& t) {
    nlohmann::ordered_json j;
    j["radius"] = t.radius;
    j["kmax"] = t.kmax;
    j["y"] = t.y;
    j["z"] = t.z;
    j["mu"] = t.mu;
    j["nu"] = t.nu;
    return j;
}

std::string trajectory_csv(const ode::RadialTrajectory& t) {
    std::string out = "rho,w,dw\n";
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        out += format_double(t.grid[i]);
        out += ',';
        out += format_double(t.w[i]);
        out += ',';
        out += format_double(t.dw[i]);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json trajectory_sidecar(const ode::RadialTrajectory& t) {
    nlohmann::ordered_json j;
    j["lambda"] = t.lambda;
    j["h"] = t.h;
    j["radius"] = t.radius;
    j["nodes"] = t.nodes;
    j["crits"] = t.crits;
    nlohmann::ordered_json segs = nlohmann::ordered_json::array();
    for (const ode::Segment& s : t.segments) {
        nlohmann::ordered_json e;
        e["r1"] = s.r1;
        e["r2"] = s.r2;
        e["case"] = case_name(s.kind);
        segs.push_back(e);
    }
    j["segments"] = segs;
    j["fully_classified"] = t.fully_classified;
    j["barrier_min"] = t.barrier_min;
    j["residual"] = t.residual;
    return j;
}

std::string branch_csv(const shooting::Branch& b) {
    std::string out = "idx,h,lambda,k,sup_w,inf_w,barrier_gap,nodes\n";
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const shooting::BranchPoint& p = b.points[i];
        out += std::to_string(i);
        out += ',';
        out += format_double(p.h);
        out += ',';
        out += format_double(p.lambda);
        out += ',';
        out += std::to_string(p.k);
        out += ',';
        out += format_double(p.sup_w);
        out += ',';
        out += format_double(p.inf_w);
        out += ',';
        out += format_double(p.barrier_gap);
        out += ',';
        out += join_doubles(p.nodes, ';');
        out += '\n';
    }
    return out;
}

std::vector<BranchRow> parse_branch_csv(const std::string& text) {
    std::vector<BranchRow> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        if (fields.size() != 8) throw UsageError("branch csv: expected 8 columns");
        BranchRow r;
        r.idx = std::stoi(fields[0]);
        r.h = std::stod(fields[1]);
        r.lambda = std::stod(fields[2]);
        r.k = std::stoi(fields[3]);
        r.sup_w = std::stod(fields[4]);
        r.inf_w = std::stod(fields[5]);
        r.barrier_gap = std::stod(fields[6]);
        std::istringstream ns(fields[7]);
        std::string tok;
        while (std::getline(ns, tok, ';'))
            if (!tok.empty()) r.nodes.push_back(std::stod(tok));
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string diagram_svg(const std::vector<shooting::Branch>& branches,
                        const specfun::EigenTable& table) {
    if (branches.empty()) throw std::invalid_argument("diagram: no branches");
    constexpr double kW = 800.0, kH = 600.0, kMargin = 62.0;
    const double plot_w = kW - 2.0 * kMargin, plot_h = kH - 2.0 * kMargin;

    double xlo = 1e300, xhi = -1e300, yhi = 0.0;
    for (const auto& b : branches) {
        for (const auto& p : b.points) {
            const double amp = std::max(std::fabs(p.sup_w), std::fabs(p.inf_w));
            xlo = std::min(xlo, p.lambda);
            xhi = std::max(xhi, p.lambda);
            yhi = std::max(yhi, amp);
        }
    }
    std::vector<double> guides;
    std::vector<std::string> guide_labels;
    for (const auto& b : branches) {
        if (b.k <= table.kmax) {
            guides.push_back(table.mu_k(b.k) / 2.0);
            guide_labels.push_back("mu_" + std::to_string(b.k) + "/2");
            const int idx = (b.k % 2 == 0) ? b.k / 2 : (b.k + 1) / 2;
            if (idx >= 1 && idx <= table.kmax) {
                guides.push_back(b.k % 2 == 0 ? table.mu_k(idx) : table.nu_k(idx));
                guide_labels.push_back(
                    (b.k % 2 == 0 ? "mu_" : "nu_") + std::to_string(idx));
            }
        }
    }
    for (double g : guides) {
        xlo = std::min(xlo, g);
        xhi = std::max(xhi, g);
    }
    const double xpad = 0.05 * (xhi - xlo + 1e-12);
    xlo -= xpad;
    xhi += xpad;
    const double ylo = 0.0;
    yhi *= 1.05;

    const auto X = [&](double v) { return kMargin + (v - xlo) / (xhi - xlo) * plot_w; };
    const auto Y = [&](double v) {
        return kH - kMargin - (v - ylo) / (yhi - ylo) * plot_h;
    };

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
         "width=\"800\" height=\"600\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    // axes
    s += "<g stroke=\"black\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + svg_coord(kMargin) + "\" y1=\"" + svg_coord(kH - kMargin) +
         "\" x2=\"" + svg_coord(kW - kMargin) + "\" y2=\"" + svg_coord(kH - kMargin) +
         "\"/>\n";
    s += "<line x1=\"" + svg_coord(kMargin) + "\" y1=\"" + svg_coord(kMargin) +
         "\" x2=\"" + svg_coord(kMargin) + "\" y2=\"" + svg_coord(kH - kMargin) +
         "\"/>\n";
    s += "</g>\n";
    // ticks and labels
    s += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
    for (double t : nice_ticks(xlo, xhi, 8)) {
        const double x = X(t);
        s += "<line x1=\"" + svg_coord(x) + "\" y1=\"" + svg_coord(kH - kMargin) +
             "\" x2=\"" + svg_coord(x) + "\" y2=\"" + svg_coord(kH - kMargin + 5) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + svg_coord(x) + "\" y=\"" + svg_coord(kH - kMargin + 18) +
             "\" text-anchor=\"middle\">" + format_double(t) + "</text>\n";
    }
    for (double t : nice_ticks(ylo, yhi, 8)) {
        const double y = Y(t);
        s += "<line x1=\"" + svg_coord(kMargin - 5) + "\" y1=\"" + svg_coord(y) +
             "\" x2=\"" + svg_coord(kMargin) + "\" y2=\"" + svg_coord(y) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + svg_coord(kMargin - 8) + "\" y=\"" + svg_coord(y + 4) +
             "\" text-anchor=\"end\">" + format_double(t) + "</text>\n";
    }
    s += "<text x=\"" + svg_coord(kW / 2) + "\" y=\"" + svg_coord(kH - 14) +
         "\" text-anchor=\"middle\">lambda</text>\n";
    s += "<text x=\"16\" y=\"" + svg_coord(kH / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + svg_coord(kH / 2) +
         ")\">sup |w|</text>\n";
    s += "</g>\n";
    // guides
    for (std::size_t i = 0; i < guides.size(); ++i) {
        const double x = X(guides[i]);
        s += "<line x1=\"" + svg_coord(x) + "\" y1=\"" + svg_coord(kMargin) +
             "\" x2=\"" + svg_coord(x) + "\" y2=\"" + svg_coord(kH - kMargin) +
             "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
        s += "<text x=\"" + svg_coord(x + 3) + "\" y=\"" +
             svg_coord(kMargin + 14 + 14 * (static_cast<double>(i % 4))) +
             "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">" +
             guide_labels[i] + "</text>\n";
    }
    // polylines
    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
        const auto& b = branches[bi];
        std::string pts;
        for (const auto& p : b.points) {
            const double amp = std::max(std::fabs(p.sup_w), std::fabs(p.inf_w));
            pts += svg_coord(X(p.lambda)) + "," + svg_coord(Y(amp)) + " ";
        }
        s += "<polyline fill=\"none\" stroke=\"";
        s += kPalette[bi % 6];
        s += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    // legend
    s += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
        const double y = kMargin + 16 + 18 * static_cast<double>(bi);
        s += "<line x1=\"" + svg_coord(kW - kMargin - 150) + "\" y1=\"" + svg_coord(y) +
             "\" x2=\"" + svg_coord(kW - kMargin - 120) + "\" y2=\"" + svg_coord(y) +
             "\" stroke=\"" + kPalette[bi % 6] + "\" stroke-width=\"1.5\"/>\n";
        s += "<text x=\"" + svg_coord(kW - kMargin - 112) + "\" y=\"" +
             svg_coord(y + 4) + "\">k=" + std::to_string(branches[bi].k) +
             (branches[bi].sign > 0 ? " (+)" : " (-)") + "</text>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

std::string diagram_sidecar_csv(const std::vector<shooting::Branch>& branches) {
    std::string out = "branch_k,sign,idx,h,lambda,sup_abs_w\n";
    for (const auto& b : branches) {
        for (std::size_t i = 0; i < b.points.size(); ++i) {
            const auto& p = b.points[i];
            out += std::to_string(b.k);
            out += ',';
            out += (b.sign > 0 ? "+" : "-");
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += format_double(p.h);
            out += ',';
            out += format_double(p.lambda);
            out += ',';
            out += format_double(std::max(std::fabs(p.sup_w), std::fabs(p.inf_w)));
            out += '\n';
        }
    }
    return out;
}

nlohmann::ordered_json scan_report_json(const shooting::DirichletScanReport& rep) {
    nlohmann::ordered_json j;
    j["lambda_min"] = rep.params.lambda_min;
    j["lambda_max"] = rep.params.lambda_max;
    j["n_lambda"] = rep.params.n_lambda;
    j["h_max"] = rep.params.h_max;
    j["n_h"] = rep.params.n_h;
    if (rep.params.h_min) j["h_min"] = *rep.params.h_min;
    else j["h_min"] = "barrier-scaled";
    j["radius"] = rep.params.radius;
    j["completed"] = rep.completed;
    j["barrier_hits"] = rep.barrier_hits;
    j["skipped_trivial"] = rep.skipped_trivial;
    j["errors"] = rep.errors;
    j["min_residual"] = rep.min_residual;
    j["argmin_lambda"] = rep.argmin_lambda;
    j["argmin_h"] = rep.argmin_h;
    j["min_abs_w_end"] = rep.min_abs_w_end;
    j["solution_cells"] = rep.solution_cells;
    return j;
}

nlohmann::ordered_json sweep_report_json(const sandbox::SweepReport& rep) {
    nlohmann::ordered_json j;
    j["model"] = rep.model;
    j["lambda_hat"] = rep.lambda_hat;
    j["a_prime0_closed"] = rep.a_prime0_closed;
    j["a_prime0_optimized"] = rep.a_prime0_optimized;
    j["b_dprime0_closed"] = rep.b_dprime0_closed;
    j["b_dprime0_optimized"] = rep.b_dprime0_optimized;
    j["largest_regime_rho"] = rep.largest_regime_rho;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : rep.entries) {
        nlohmann::ordered_json je;
        je["rho"] = e.rho;
        for (int which = 0; which < 2; ++which) {
            const sandbox::CriticalPair& p = which == 0 ? e.first : e.second;
            nlohmann::ordered_json jp;
            jp["lambda"] = p.lambda;
            jp["mu"] = p.mu;
            jp["f"] = p.f_val;
            jp["kkt_residual"] = p.kkt_residual;
            jp["u"] = std::vector<double>(p.u.data(), p.u.data() + p.u.size());
            jp["boundary_exclusion"] =
                which == 0 ? e.exclusion_first : e.exclusion_second;
            jp["C1"] = which == 0 ? e.c1_first : e.c1_second;
            jp["C2"] = which == 0 ? e.c2_first : e.c2_second;
            je[which == 0 ? "first" : "second"] = jp;
        }
        nlohmann::ordered_json jb;
        jb["a_prime"] = e.bounds.a_prime;
        jb["a_dprime"] = e.bounds.a_dprime;
        jb["b_prime"] = e.bounds.b_prime;
        jb["b_dprime"] = e.bounds.b_dprime;
        je["level_bounds"] = jb;
        entries.push_back(je);
    }
    j["entries"] = entries;
    return j;
}

nlohmann::ordered_json point_report_json(const estimates::PointReport& rep) {
    nlohmann::ordered_json j;
    j["pass"] = rep.pass;
    j["worst_margin"] = rep.worst_margin;
    const auto check_json = [](const estimates::CheckResult& c) {
        nlohmann::ordered_json jc;
        jc["id"] = c.id;
        jc["lhs"] = c.lhs;
        jc["rhs"] = c.rhs;
        jc["margin"] = c.margin;
        jc["pass"] = c.pass;
        return jc;
    };
    nlohmann::ordered_json segs = nlohmann::ordered_json::array();
    for (const auto& sc : rep.segments) {
        nlohmann::ordered_json js;
        js["r1"] = sc.r1;
        js["r2"] = sc.r2;
        js["case"] = case_name(sc.kind);
        js["pass"] = sc.pass;
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (const auto& c : sc.checks) checks.push_back(check_json(c));
        js["checks"] = checks;
        segs.push_back(js);
    }
    j["segments"] = segs;
    nlohmann::ordered_json extra = nlohmann::ordered_json::array();
    for (const auto& c : rep.extra) extra.push_back(check_json(c));
    j["extra"] = extra;
    nlohmann::ordered_json lb = nlohmann::ordered_json::array();
    for (const auto& c : rep.lambda_bounds.checks) lb.push_back(check_json(c));
    j["lambda_bounds"] = lb;
    return j;
}

sandbox::SandboxModel load_sandbox_model(const nlohmann::json& j) {
    sandbox::SandboxModel m;
    m.name = j.value("name", std::string("custom"));
    m.n = j.at("n").get<int>();
    m.K = sandbox::Mat::Zero(m.n, m.n);
    if (j.contains("diag")) {
        const auto d = j.at("diag").get<std::vector<double>>();
        if (static_cast<int>(d.size()) != m.n)
            throw UsageError("sandbox model: diag size mismatch");
        for (int i = 0; i < m.n; ++i) m.K(i, i) = d[static_cast<std::size_t>(i)];
    } else {
        const auto rows = j.at("A").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(rows.size()) != m.n)
            throw UsageError("sandbox model: A size mismatch");
        for (int r = 0; r < m.n; ++r)
            for (int c = 0; c < m.n; ++c)
                m.K(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    m.lambda_hat = j.at("lambda_hat").get<double>();
    m.delta = j.value("delta", 0.125);
    m.eps0 = j.at("eps0").get<double>();
    const double c4 = j.value("H_quartic", 0.0);
    const double c6 = j.value("H1_sextic", 0.0);
    if (c4 != 0.0) {
        m.H.value = [c4](const sandbox::Vec& u) { return c4 * u.array().pow(4).sum(); };
        m.H.grad = [c4](const sandbox::Vec& u) {
            return sandbox::Vec(4.0 * c4 * u.array().cube());
        };
    }
    if (c6 != 0.0) {
        m.H1.value = [c6](const sandbox::Vec& u) { return c6 * u.array().pow(6).sum(); };
        m.H1.grad = [c6](const sandbox::Vec& u) {
            return sandbox::Vec(6.0 * c6 * u.array().pow(5));
        };
    }
    sandbox::finalize_model(m);
    return m;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace singbif::io
