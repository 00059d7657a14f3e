#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blackrt/commands.hpp"
#include "blackrt/csv.hpp"
#include "blackrt/numeric.hpp"

using namespace blackrt;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("blackrt_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kPow2Config = R"(# doubled power utility
[market]
lambda_sq = 1.0
horizon = 1.0

[utility]
variant = expsum
atoms = 2:1

[grid]
x_min = 0.5
x_max = 10
nx = 20
nt = 5
fd_nx = 64
fd_nt = 64

[output]
dir = OUTDIR
)";

std::string config_with_out(const std::string& base, const fs::path& out) {
    std::string text = base;
    const auto pos = text.find("OUTDIR");
    text.replace(pos, 6, out.string());
    return text;
}

}  // namespace

TEST_CASE("config parser: sections, comments, matrices, errors with line numbers") {
    const RunConfig cfg = RunConfig::parse_text(
        "[market]\n"
        "sigma = 0.2 0; 0.05 0.3   # matrix\n"
        "mu = 0.05 0.08\n"
        "rate = 0.01\n"
        "\n"
        "[grid]\n"
        "nx = 64\n");
    std::size_t n = 0;
    const auto sigma = cfg.get_matrix("market", "sigma", n);
    CHECK(n == 2);
    CHECK(sigma[3] == 0.3);
    CHECK(cfg.get_vector("market", "mu").size() == 2);
    CHECK(cfg.get_int_or("grid", "nx", 0) == 64);
    CHECK(cfg.get_or("grid", "missing", "d") == "d");

    CHECK_THROWS_WITH_AS(RunConfig::parse_text("[market\n", "cfg"), doctest::Contains("cfg:1"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(RunConfig::parse_text("[m]\nnonsense\n", "cfg"), doctest::Contains("cfg:2"),
                         ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("key = 1\n"), ConfigError);  // key outside a section
}

TEST_CASE("inputs assembly from a config") {
    const RunConfig cfg = RunConfig::parse_text(
        "[market]\nsigma = 0.2\nmu = 0.04\nrate = 0\nhorizon = 1\n"
        "[utility]\nvariant = expsum\natoms = 2:1; 3:1\n"
        "[grid]\nx_min = 0.1\nx_max = 50\nnx = 11\nnt = 3\n");
    const RunInputs in = build_inputs(cfg);
    CHECK(in.market.lambda_sq() == doctest::Approx(0.04));
    CHECK(in.spec.atoms().size() == 2);
    CHECK(in.nx == 11);

    CHECK_THROWS_AS(build_inputs(RunConfig::parse_text("[utility]\nvariant = nosuch\n")), ConfigError);
    CHECK_THROWS_AS(build_inputs(RunConfig::parse_text(
                        "[market]\nlambda_sq = 1\n[utility]\nvariant = expsum\natoms = 2:1\n"
                        "[grid]\nx_min = -1\n")),
                    ConfigError);
}

TEST_CASE("solve command writes a surface whose r column doubles x") {
    const fs::path dir = fresh_dir("solve");
    const fs::path cfg_path = write_file(dir, "run.cfg", config_with_out(kPow2Config, dir / "out"));
    const RunInputs in = load_inputs(cfg_path, {});
    CHECK(cmd_solve(in, {}) == 0);

    std::ifstream csv(dir / "out" / "surface_transform.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,t,r,rx,rxx,rtilde,gamma,residual,provenance");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::istringstream ss(line);
        std::string xs, ts, rs;
        std::getline(ss, xs, ',');
        std::getline(ss, ts, ',');
        std::getline(ss, rs, ',');
        CHECK(std::stod(rs) == doctest::Approx(2.0 * std::stod(xs)).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows == 20 * 5);
    CHECK(fs::exists(dir / "out" / "summary.json"));
}

TEST_CASE("oracle command reports the transform diff") {
    const fs::path dir = fresh_dir("oracle");
    const fs::path cfg_path = write_file(dir, "run.cfg", config_with_out(kPow2Config, dir / "out"));
    const RunInputs in = load_inputs(cfg_path, {});
    CommandOptions opts;
    opts.square = true;
    CHECK(cmd_oracle(in, opts) == 0);
    CHECK(fs::exists(dir / "out" / "surface_fd.csv"));
    CHECK(fs::exists(dir / "out" / "surface_f.csv"));
    const std::string summary = slurp(dir / "out" / "summary_fd.json");
    CHECK(summary.find("transform_diff") != std::string::npos);
}

TEST_CASE("check command exit status follows the verdicts") {
    const fs::path dir = fresh_dir("check");
    const std::string base = config_with_out(kPow2Config, dir / "out");

    // passing check
    RunInputs in = load_inputs(write_file(dir, "pass.cfg", base + "[checks]\nrun = cm_bounds\n"), {});
    CHECK(cmd_check(in, {}) == 0);

    // failing check: the doubled power is (weakly) convex, asking for strictly
    // wrong curvature on a mixed fixture must fail
    const std::string mix = [&] {
        std::string t = base;
        t.replace(t.find("atoms = 2:1"), std::string("atoms = 2:1").size(), "atoms = 2:1; 3:1");
        return t;
    }();
    in = load_inputs(write_file(dir, "fail.cfg", mix + "[checks]\nrun = curvature:expect=concave\n"), {});
    CHECK(cmd_check(in, {}) == 1);

    // empty list and unknown ids are usage errors
    in = load_inputs(write_file(dir, "none.cfg", base), {});
    CHECK_THROWS_AS(cmd_check(in, {}), ConfigError);
    in = load_inputs(write_file(dir, "unknown.cfg", base + "[checks]\nrun = nosuch\n"), {});
    CHECK_THROWS_AS(cmd_check(in, {}), ConfigError);
}

TEST_CASE("every check id routes through the check command") {
    const fs::path dir = fresh_dir("routing");

    SUBCASE("lambda monotonicity and relative monotonicity on the mixed fixture") {
        const std::string cfg_text =
            "[market]\nlambda_sq = 1\nhorizon = 1\n"
            "[utility]\nvariant = expsum\natoms = 2:1; 3:1\n"
            "[grid]\nx_min = 0.1\nx_max = 50\nnx = 41\nnt = 5\nfd_nx = 64\nfd_nt = 64\n"
            "[checks]\nrun = lambda_monotonicity; relative_monotonicity:expect=increasing\n"
            "lambda_sq_low = 0.04\nlambda_sq_high = 0.09\n"
            "[output]\ndir = " +
            (dir / "outA").string() + "\n";
        const RunInputs in = load_inputs(write_file(dir, "a.cfg", cfg_text), {});
        CHECK(cmd_check(in, {}) == 0);
        const std::string rep = slurp(dir / "outA" / "report.json");
        CHECK(rep.find("lambda_monotonicity") != std::string::npos);
    }
    SUBCASE("relative curvature and log-curvature preservation on the constructed fixture") {
        const std::string cfg_text =
            "[market]\nlambda_sq = 1\nhorizon = 1\n"
            "[utility]\nvariant = powexp\nc = 1.0\n"
            "[grid]\nx_min = 0.05\nx_max = 15\nnx = 21\nnt = 4\nquad_order = 96\n"
            "[checks]\nrun = relative_curvature; logconcavity:mode=concave,datum=gaussian\n"
            "[output]\ndir = " +
            (dir / "outB").string() + "\n";
        const RunInputs in = load_inputs(write_file(dir, "b.cfg", cfg_text), {});
        CHECK(cmd_check(in, {}) == 0);
        const std::string rep = slurp(dir / "outB" / "report.json");
        CHECK(rep.find("convex case") != std::string::npos);
    }
    SUBCASE("comparison against a second configured utility") {
        const std::string cfg_text =
            "[market]\nlambda_sq = 1\nhorizon = 1\n"
            "[utility]\nvariant = expsum\natoms = 2:1\n"
            "r2_variant = expsum\nr2_atoms = 3:1\n"
            "[grid]\nx_min = 0.1\nx_max = 20\nnx = 21\nnt = 3\nfd_nx = 64\nfd_nt = 64\n"
            "[checks]\nrun = comparison\n"
            "[output]\ndir = " +
            (dir / "outC").string() + "\n";
        const RunInputs in = load_inputs(write_file(dir, "c.cfg", cfg_text), {});
        CHECK(cmd_check(in, {}) == 0);
    }
    SUBCASE("inflection tracking on a tabulated s-shaped table") {
        std::ostringstream table;
        table << "x,R\n";
        for (int i = 0; i <= 600; ++i) {
            const double x = 24.0 * i / 600.0;
            table << format_double(x) << ','
                  << format_double(x + 2.0 * (1.0 - (1.0 + x) * std::exp(-x))) << '\n';
        }
        write_file(dir, "sshape.csv", table.str());
        const std::string cfg_text =
            "[market]\nlambda_sq = 1\nhorizon = 1\n"
            "[utility]\nvariant = tabulated_r\nfile = sshape.csv\n"
            "[grid]\nx_min = 0.1\nx_max = 20\nnx = 21\nnt = 3\nfd_nx = 256\nfd_nt = 256\n"
            "[checks]\nrun = inflection_curve\n"
            "[output]\ndir = " +
            (dir / "outD").string() + "\n";
        const RunInputs in = load_inputs(write_file(dir, "d.cfg", cfg_text), {});
        CHECK(cmd_check(in, {}) == 0);
        const std::string rep = slurp(dir / "outD" / "report.json");
        CHECK(rep.find("X(T)=") != std::string::npos);
    }
}

TEST_CASE("policy command emits per-asset columns") {
    const fs::path dir = fresh_dir("policy");
    const std::string cfg_text =
        "[market]\nsigma = 0.2\nmu = 0.04\nrate = 0\nhorizon = 1\n"
        "[utility]\nvariant = expsum\natoms = 1:1\n"
        "[grid]\nx_min = 1\nx_max = 5\nnx = 5\nnt = 2\n"
        "[output]\ndir = " +
        (dir / "out").string() + "\n";
    const RunInputs in = load_inputs(write_file(dir, "run.cfg", cfg_text), {});
    CHECK(cmd_policy(in, {}) == 0);
    std::ifstream csv(dir / "out" / "policy.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,t,r,pi_1,total");
    std::getline(csv, line);
    std::istringstream ss(line);
    std::string xs, ts, rs, pis;
    std::getline(ss, xs, ',');
    std::getline(ss, ts, ',');
    std::getline(ss, rs, ',');
    std::getline(ss, pis, ',');
    // log utility with (mu - rate)/sigma^2 = 1 invests the whole wealth
    CHECK(std::stod(pis) == doctest::Approx(std::stod(xs)).epsilon(1e-9));
}

TEST_CASE("tabulated utilities route to the oracle and skip the transform diff") {
    const fs::path dir = fresh_dir("tab");
    std::ostringstream table;
    table << "x,R\n";
    for (int i = 0; i <= 400; ++i) {
        const double x = 20.0 * i / 400.0;
        table << format_double(x) << ',' << format_double(x + 2.0 * (1.0 - (1.0 + x) * std::exp(-x)))
              << '\n';
    }
    write_file(dir, "sshape.csv", table.str());
    const std::string cfg_text =
        "[market]\nlambda_sq = 1\nhorizon = 1\n"
        "[utility]\nvariant = tabulated_r\nfile = sshape.csv\n"
        "[grid]\nx_min = 0.1\nx_max = 18\nnx = 32\nnt = 4\nfd_nx = 128\nfd_nt = 128\n"
        "[output]\ndir = " +
        (dir / "out").string() + "\n";
    const RunInputs in = load_inputs(write_file(dir, "run.cfg", cfg_text), {});
    CHECK(cmd_oracle(in, {}) == 0);
    const std::string summary = slurp(dir / "out" / "summary_fd.json");
    CHECK(summary.find("skipped: no inverse marginal") != std::string::npos);
    CHECK_THROWS_AS(cmd_solve(in, {}), ConfigError);
}

TEST_CASE("report runs are byte-identical") {
    const fs::path dir = fresh_dir("determinism");
    const std::string base = config_with_out(kPow2Config, dir / "outA") + "[checks]\nrun = cm_bounds\n";
    const fs::path cfgA = write_file(dir, "a.cfg", base);
    std::string textB = base;
    textB.replace(textB.find((dir / "outA").string()), (dir / "outA").string().size(),
                  (dir / "outB").string());
    const fs::path cfgB = write_file(dir, "b.cfg", textB);

    CHECK(cmd_report(load_inputs(cfgA, {}), {}) == 0);
    CHECK(cmd_report(load_inputs(cfgB, {}), {}) == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "outA")) {
        const fs::path other = dir / "outB" / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
        ++files;
    }
    CHECK(files >= 4);
}

TEST_CASE("binary exit codes through a subprocess") {
    const fs::path dir = fresh_dir("subproc");
    const std::string base = config_with_out(kPow2Config, dir / "out");
    const fs::path pass_cfg = write_file(dir, "pass.cfg", base + "[checks]\nrun = cm_bounds\n");
    const fs::path fail_cfg = write_file(dir, "fail.cfg", [&] {
        std::string t = base;
        t.replace(t.find("atoms = 2:1"), std::string("atoms = 2:1").size(), "atoms = 2:1; 3:1");
        return t + "[checks]\nrun = curvature:expect=concave\n";
    }());
    const fs::path err_cfg = write_file(dir, "err.cfg", base);  // no checks

    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(BLACKRT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(run("check --config " + pass_cfg.string()) == 0);
    CHECK(run("check --config " + fail_cfg.string()) == 1);
    CHECK(run("check --config " + err_cfg.string()) == 2);
    CHECK(run("check --config /nonexistent.cfg") == 2);
    CHECK(run("solve --config " + pass_cfg.string() + " --emit-h") == 0);
    CHECK(fs::exists(dir / "out" / "h_surface.csv"));
}
