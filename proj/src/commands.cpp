#include "blackrt/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "blackrt/csv.hpp"
#include "blackrt/merton.hpp"
#include "blackrt/numeric.hpp"
#include "blackrt/property_suite.hpp"

namespace blackrt {

namespace {

using ordered_json = nlohmann::ordered_json;

void apply_overrides(RunInputs& in, const CommandOptions& opts) {
    if (opts.out_dir) in.out_dir = *opts.out_dir;
    if (opts.nx) in.nx = static_cast<std::size_t>(*opts.nx);
    if (opts.nt) in.nt = static_cast<std::size_t>(*opts.nt);
    if (opts.quad_order) in.quad_order = static_cast<std::size_t>(*opts.quad_order);
}

HeatSurface make_heat_surface(const RunInputs& in) {
    if (!in.spec.has_inverse_marginal())
        throw ConfigError("the transform needs an inverse marginal; this utility has only tabulated R");
    QuadratureParams qp;
    qp.order = in.quad_order;
    const HeatEvaluator kind = in.spec.kind() == UtilitySpec::Kind::analytic_i ? HeatEvaluator::quadrature
                                                                               : HeatEvaluator::closed_form;
    return HeatSurface(in.spec, in.market, kind, qp);
}

RTSurface build_transform_surface(const RunInputs& in, const HeatSurface& h) {
    return RTSurface::from_transform(h, linspace(in.x_min, in.x_max, in.nx),
                                     linspace(0.0, in.market.horizon(), in.nt));
}

FDConfig make_fd_config(const RunInputs& in) {
    FDConfig fd;
    fd.x_max = in.x_max;
    fd.nx = in.fd_nx;
    fd.nt = in.fd_nt;
    fd.lambda_sq = in.market.lambda_sq();
    fd.horizon = in.market.horizon();
    const UtilitySpec spec = in.spec;
    if (spec.kind() == UtilitySpec::Kind::tabulated_r) {
        // The solver samples a padded window; continue the table linearly
        // past its end (the admissible class is asymptotically linear there).
        const auto& tab = spec.tabulated();
        const double xe = tab.x_max();
        const double re = tab(xe);
        const double slope = tab.derivative(xe);
        fd.terminal = [spec, xe, re, slope](double x) {
            if (x <= 0.0) return 0.0;
            if (x > xe) return re + slope * (x - xe);
            return eval_R_terminal(spec, x);
        };
    } else {
        fd.terminal = [spec](double x) { return x > 0.0 ? eval_R_terminal(spec, x) : 0.0; };
    }
    return fd;
}

ordered_json bounds_json(const EmpiricalBounds& b) {
    return ordered_json{{"k0", b.k0},       {"K0", b.K0},       {"k1", b.k1},
                        {"K1", b.K1},       {"K2", b.K2},       {"K_r_rxx", b.K_r_rxx},
                        {"K_rsq_xx", b.K_rsq_xx}, {"m_rt", b.m_rt}, {"M_rt", b.M_rt}};
}

ordered_json inputs_json(const RunInputs& in) {
    return ordered_json{{"utility", in.spec.describe()},
                        {"lambda_sq", in.market.lambda_sq()},
                        {"horizon", in.market.horizon()},
                        {"assets", in.market.num_assets()},
                        {"x_min", in.x_min},
                        {"x_max", in.x_max},
                        {"nx", in.nx},
                        {"nt", in.nt},
                        {"fd_nx", in.fd_nx},
                        {"fd_nt", in.fd_nt},
                        {"quad_order", in.quad_order}};
}

void write_json(const ordered_json& j, const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

std::pair<double, double> z_grid_range(const RunInputs& in, const HeatSurface& h) {
    if (in.z_range) return *in.z_range;
    return h.z_bracket(in.x_min, in.x_max);
}

struct DiffReport {
    double sup_rel = 0.0;
    double at_x = 0.0, at_t = 0.0;
    std::size_t points = 0;
};

DiffReport diff_surfaces(const RTSurface& fd, const HeatSurface& h, std::size_t stride) {
    DiffReport d;
    for (std::size_t ti = 0; ti < fd.nt(); ti += stride) {
        for (std::size_t xi = 1; xi < fd.nx(); xi += stride) {
            const double x = fd.x_grid()[xi];
            const double want = eval_r(h, x, fd.t_grid()[ti]).r;
            const double rel = rel_diff(fd.r(xi, ti), want);
            ++d.points;
            if (rel > d.sup_rel) {
                d.sup_rel = rel;
                d.at_x = x;
                d.at_t = fd.t_grid()[ti];
            }
        }
    }
    return d;
}

struct ParsedCheck {
    std::string name;
    std::map<std::string, std::string> params;
};

ParsedCheck parse_check_id(const std::string& id) {
    ParsedCheck pc;
    const auto colon = id.find(':');
    pc.name = id.substr(0, colon);
    if (colon != std::string::npos) {
        std::istringstream ss(id.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ConfigError("check parameter '" + item + "' is not key=value");
            pc.params[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }
    return pc;
}

ordered_json record_json(const CheckRecord& rec) {
    ordered_json j{{"check", rec.check},
                   {"fixture", rec.fixture},
                   {"grid", rec.grid},
                   {"applicable", rec.applicable},
                   {"passed", rec.passed},
                   {"worst_violation", rec.worst_violation},
                   {"tolerance", rec.tolerance},
                   {"note", rec.note}};
    if (std::isfinite(rec.where_x)) j["where_x"] = rec.where_x;
    if (std::isfinite(rec.where_t)) j["where_t"] = rec.where_t;
    return j;
}

PropertyReport run_checks(const RunInputs& in) {
    if (in.checks.empty()) throw ConfigError("no checks selected");
    PropertyReport report;
    const std::string fixture = in.spec.describe();

    // Surfaces are built lazily; several checks can share them.
    std::optional<HeatSurface> heat;
    std::optional<RTSurface> surf;
    auto heat_surface = [&]() -> const HeatSurface& {
        if (!heat) heat.emplace(make_heat_surface(in));
        return *heat;
    };
    auto surface = [&]() -> const RTSurface& {
        if (!surf) {
            if (in.spec.has_inverse_marginal())
                surf = build_transform_surface(in, heat_surface());
            else
                surf = solve_black(make_fd_config(in));
        }
        return *surf;
    };

    for (const auto& id : in.checks) {
        const ParsedCheck pc = parse_check_id(id);
        auto expect_param = [&](const char* key) -> std::string {
            auto it = pc.params.find(key);
            if (it == pc.params.end()) throw ConfigError("check '" + pc.name + "' needs parameter " + key);
            return it->second;
        };
        if (pc.name == "monotonicity") {
            report.push_back(check_monotonicity(surface(), in.check_tol, fixture));
        } else if (pc.name == "curvature") {
            const std::string e = expect_param("expect");
            if (e != "concave" && e != "convex") throw ConfigError("curvature: expect must be concave|convex");
            report.push_back(
                check_curvature(surface(), e == "concave" ? Curvature::concave : Curvature::convex,
                                in.check_tol, fixture));
        } else if (pc.name == "cm_bounds") {
            report.push_back(check_cm_bounds(heat_surface(), surface(), in.check_tol, fixture));
        } else if (pc.name == "relative_monotonicity") {
            const std::string e = expect_param("expect");
            if (e != "increasing" && e != "decreasing")
                throw ConfigError("relative_monotonicity: expect must be increasing|decreasing");
            report.push_back(check_relative_monotonicity(
                surface(), e == "increasing" ? Trend::increasing : Trend::decreasing, in.check_tol, fixture));
        } else if (pc.name == "relative_curvature") {
            const auto [z_lo, z_hi] = z_grid_range(in, heat_surface());
            const auto zs = linspace(z_lo, z_hi, 41);
            const auto ts = linspace(0.0, in.market.horizon(), in.nt);
            report.push_back(check_relative_curvature(heat_surface(), zs, ts,
                                                      in.check_tol < 0 ? 1e-7 : in.check_tol, fixture));
        } else if (pc.name == "lambda_monotonicity") {
            if (in.spec.has_inverse_marginal()) {
                const auto xs = linspace(in.x_min, in.x_max, in.nx);
                const auto ts = linspace(0.0, in.market.horizon(), in.nt);
                report.push_back(check_lambda_monotonicity(in.spec, in.lambda_sq_low, in.lambda_sq_high, xs,
                                                           ts, in.market.horizon(), in.check_tol, fixture));
            } else {
                report.push_back(check_lambda_monotonicity_fd(make_fd_config(in).terminal, in.lambda_sq_low,
                                                              in.lambda_sq_high, make_fd_config(in),
                                                              in.check_tol, fixture));
            }
        } else if (pc.name == "inflection_curve") {
            report.push_back(track_inflection_curve(surface(), in.check_tol, fixture).record);
        } else if (pc.name == "comparison") {
            if (!in.comparison_r2) throw ConfigError("comparison: needs [utility] r2_variant");
            FDConfig fd = make_fd_config(in);
            const UtilitySpec r2 = *in.comparison_r2;
            auto R2 = [r2](double x) { return x > 0.0 ? eval_R_terminal(r2, x) : 0.0; };
            report.push_back(check_comparison(fd.terminal, R2, fd, in.check_tol, fixture));
        } else if (pc.name == "logconcavity") {
            const std::string mode = expect_param("mode");
            if (mode != "concave" && mode != "convex")
                throw ConfigError("logconcavity: mode must be concave|convex");
            const std::string datum = pc.params.count("datum") ? pc.params.at("datum") : "terminal";
            std::function<double(double)> h0;
            if (datum == "gaussian") {
                h0 = [](double z) { return std::exp(-z * z); };
            } else if (datum == "terminal") {
                const UtilitySpec spec = in.spec;
                if (!spec.has_inverse_marginal()) throw ConfigError("logconcavity: terminal datum needs I");
                h0 = [spec](double z) { return eval_I(spec, std::exp(-z), 0); };
            } else {
                throw ConfigError("logconcavity: datum must be gaussian|terminal");
            }
            const auto zs = linspace(-4.0, 4.0, 33);
            const auto ts = linspace(0.0, in.market.horizon(), 5);
            report.push_back(check_logconcavity_preservation(
                h0, in.market, zs, ts,
                mode == "concave" ? LogCurvature::log_concave : LogCurvature::log_convex,
                in.check_tol < 0 ? 1e-6 : in.check_tol, fixture));
        } else {
            throw ConfigError("unknown check id '" + pc.name + "'");
        }
    }
    return report;
}

int emit_report(const PropertyReport& report, const std::filesystem::path& out_path) {
    ordered_json arr = ordered_json::array();
    bool all_pass = true;
    for (const auto& rec : report) {
        arr.push_back(record_json(rec));
        all_pass = all_pass && rec.passed;
        std::cout << (rec.passed ? "pass" : (rec.applicable ? "FAIL" : "skip")) << "  " << rec.check
                  << "  worst=" << rec.worst_violation << "  tol=" << rec.tolerance
                  << (rec.note.empty() ? "" : "  [" + rec.note + "]") << '\n';
    }
    write_json(arr, out_path);
    return all_pass ? 0 : 1;
}

}  // namespace

RunInputs load_inputs(const std::filesystem::path& config_path, const CommandOptions& opts) {
    RunInputs in = build_inputs(RunConfig::parse_file(config_path));
    apply_overrides(in, opts);
    return in;
}

int cmd_solve(const RunInputs& in, const CommandOptions& opts) {
    const HeatSurface h = make_heat_surface(in);
    const RTSurface s = build_transform_surface(in, h);
    write_rt_surface_csv(s, in.out_dir / "surface_transform.csv");
    ordered_json summary{{"inputs", inputs_json(in)},
                         {"provenance", "transform"},
                         {"empirical_bounds", bounds_json(s.empirical_bounds())}};
    write_json(summary, in.out_dir / "summary.json");
    if (opts.emit_h) {
        const auto [z_lo, z_hi] = z_grid_range(in, h);
        write_h_surface_csv(h, linspace(z_lo, z_hi, in.nx), linspace(0.0, in.market.horizon(), in.nt),
                            in.out_dir / "h_surface.csv");
    }
    std::cout << "wrote " << (in.out_dir / "surface_transform.csv").string() << '\n';
    return 0;
}

int cmd_oracle(const RunInputs& in, const CommandOptions& opts) {
    const FDConfig fd = make_fd_config(in);
    const RTSurface s = solve_black(fd);
    write_rt_surface_csv(s, in.out_dir / "surface_fd.csv");
    ordered_json summary{{"inputs", inputs_json(in)},
                         {"provenance", "fd"},
                         {"empirical_bounds", bounds_json(s.empirical_bounds())}};
    if (in.spec.has_inverse_marginal()) {
        const HeatSurface h = make_heat_surface(in);
        const std::size_t stride = std::max<std::size_t>(1, s.nx() / 65);
        const DiffReport d = diff_surfaces(s, h, stride);
        summary["transform_diff"] = ordered_json{
            {"sup_rel", d.sup_rel}, {"at_x", d.at_x}, {"at_t", d.at_t}, {"points", d.points}};
        std::cout << "fd vs transform sup relative diff " << d.sup_rel << " over " << d.points << " nodes\n";
    } else {
        summary["transform_diff"] = "skipped: no inverse marginal";
        std::cout << "transform diff skipped (tabulated terminal)\n";
    }
    if (opts.square) {
        const FSurface f = solve_F(fd);
        write_f_surface_csv(f, in.out_dir / "surface_f.csv");
        double sup = 0.0;
        for (std::size_t ti = 0; ti < s.nt(); ++ti)
            for (std::size_t xi = 1; xi < s.nx(); ++xi)
                sup = std::max(sup, rel_diff(std::sqrt(f.value(xi, ti)), s.r(xi, ti)));
        summary["sqrtF_vs_r_sup_rel"] = sup;
        std::cout << "sqrt(F) vs r sup relative diff " << sup << '\n';
    }
    write_json(summary, in.out_dir / "summary_fd.json");
    return 0;
}

int cmd_check(const RunInputs& in, const CommandOptions&) {
    return emit_report(run_checks(in), in.out_dir / "report.json");
}

int cmd_policy(const RunInputs& in, const CommandOptions&) {
    const HeatSurface h = make_heat_surface(in);
    const auto xs = linspace(in.x_min, in.x_max, in.nx);
    const auto ts = linspace(0.0, in.market.horizon(), in.nt);
    std::filesystem::create_directories(in.out_dir);
    std::ofstream out(in.out_dir / "policy.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open policy.csv for writing");
    out << "x,t,r";
    for (std::size_t i = 1; i <= in.market.num_assets(); ++i) out << ",pi_" << i;
    out << ",total\n";
    for (double t : ts) {
        for (double x : xs) {
            const PolicySample p = eval_policy(h, in.market, x, t);
            out << format_double(x) << ',' << format_double(t) << ',' << format_double(p.r);
            for (double v : p.pi) out << ',' << format_double(v);
            out << ',' << format_double(p.total) << '\n';
        }
    }
    std::cout << "wrote " << (in.out_dir / "policy.csv").string() << '\n';
    return 0;
}

int cmd_report(const RunInputs& in, const CommandOptions& opts) {
    int rc = 0;
    if (in.spec.has_inverse_marginal()) {
        cmd_solve(in, opts);
        cmd_policy(in, opts);
    }
    cmd_oracle(in, opts);
    if (!in.checks.empty()) rc = cmd_check(in, opts);
    return rc;
}

}  // namespace blackrt
