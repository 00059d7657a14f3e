#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blackrt/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"risk tolerance surface engine: transform solver, finite-difference oracle, property checks"};
    app.require_subcommand(1);

    std::string config_path;
    blackrt::CommandOptions opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", opts.out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--nx", opts.nx, "override [grid] nx");
        sub->add_option("--nt", opts.nt, "override [grid] nt");
        sub->add_option("--quad-order", opts.quad_order, "override [grid] quad_order");
        return sub;
    };

    auto* solve = add_common(app.add_subcommand("solve", "transform surface to CSV + JSON summary"));
    solve->add_flag("--emit-h", opts.emit_h, "also export the H surface");
    auto* oracle = add_common(app.add_subcommand("oracle", "finite-difference surface and transform diff"));
    oracle->add_flag("--square", opts.square, "also solve the squared-field equation");
    auto* check = add_common(app.add_subcommand("check", "run the configured property checks"));
    auto* policy = add_common(app.add_subcommand("policy", "optimal allocation table"));
    auto* report = add_common(app.add_subcommand("report", "bundle solve, oracle, checks and policy"));
    report->add_flag("--emit-h", opts.emit_h, "also export the H surface");
    report->add_flag("--square", opts.square, "also solve the squared-field equation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) != 0 ? 2 : 0;
    }

    try {
        const blackrt::RunInputs in = blackrt::load_inputs(config_path, opts);
        if (solve->parsed()) return blackrt::cmd_solve(in, opts);
        if (oracle->parsed()) return blackrt::cmd_oracle(in, opts);
        if (check->parsed()) return blackrt::cmd_check(in, opts);
        if (policy->parsed()) return blackrt::cmd_policy(in, opts);
        if (report->parsed()) return blackrt::cmd_report(in, opts);
        return 2;
    } catch (const blackrt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
