#include "blackrt/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "blackrt/csv.hpp"

namespace blackrt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line, const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_text(buf.str(), path.string());
    cfg.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return cfg;
}

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    cfg.origin_ = origin;
    cfg.base_dir_ = ".";
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) parse_fail(origin, lineno, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(origin, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(origin, lineno, "empty key");
        if (section.empty()) parse_fail(origin, lineno, "key outside any [section]");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string RunConfig::get(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError(origin_ + ": missing [" + section + "] " + key);
    return sections_.at(section).at(key);
}

std::string RunConfig::get_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": not a number: '" + v + "'");
    }
}

double RunConfig::get_double_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long RunConfig::get_int_or(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const double d = get_double(section, key);
    if (d != std::floor(d)) throw ConfigError(origin_ + ": [" + section + "] " + key + ": expected an integer");
    return static_cast<long>(d);
}

std::vector<double> RunConfig::get_vector(const std::string& section, const std::string& key) const {
    std::istringstream ss(get(section, key));
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    if (!ss.eof()) throw ConfigError(origin_ + ": [" + section + "] " + key + ": bad vector literal");
    return out;
}

std::vector<double> RunConfig::get_matrix(const std::string& section, const std::string& key,
                                          std::size_t& n) const {
    const auto rows = split(get(section, key), ';');
    n = rows.size();
    std::vector<double> out;
    for (const auto& row : rows) {
        std::istringstream ss(row);
        std::size_t count = 0;
        double v;
        while (ss >> v) {
            out.push_back(v);
            ++count;
        }
        if (count != n) throw ConfigError(origin_ + ": [" + section + "] " + key + ": matrix must be square");
    }
    return out;
}

std::vector<std::string> RunConfig::get_list_or(const std::string& section, const std::string& key) const {
    if (!has(section, key)) return {};
    return split(get(section, key), ';');
}

namespace {

std::vector<CMAtom> parse_atoms(const std::string& text) {
    std::vector<CMAtom> atoms;
    for (const auto& tok : split(text, ';')) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw ConfigError("atom '" + tok + "' is not y:w");
        try {
            atoms.push_back({std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
        } catch (const std::exception&) {
            throw ConfigError("atom '" + tok + "' has bad numbers");
        }
    }
    return atoms;
}

UtilitySpec spec_from_section(const RunConfig& cfg, const std::string& prefix) {
    const std::string variant = cfg.get_or("utility", prefix + "variant", "");
    if (variant.empty()) throw ConfigError("missing [utility] " + prefix + "variant");
    if (variant == "expsum") return UtilitySpec::exp_sum(parse_atoms(cfg.get("utility", prefix + "atoms")));
    if (variant == "cm") return UtilitySpec::cm_measure(parse_atoms(cfg.get("utility", prefix + "atoms")));
    if (variant == "powexp") return make_powexp_spec(cfg.get_double_or("utility", prefix + "c", 1.0));
    if (variant == "tabulated_r") {
        std::filesystem::path p = cfg.get("utility", prefix + "file");
        if (p.is_relative()) p = cfg.base_dir() / p;
        std::vector<double> x, r;
        read_r_table_csv(p, x, r);
        return UtilitySpec::tabulated_r(std::move(x), std::move(r));
    }
    throw ConfigError("unknown utility variant '" + variant + "'");
}

}  // namespace

RunInputs build_inputs(const RunConfig& cfg) {
    RunInputs in;
    try {
        in.spec = spec_from_section(cfg, "");

        if (cfg.has("market", "lambda_sq")) {
            in.market = MarketParams::from_lambda_sq(cfg.get_double("market", "lambda_sq"),
                                                     cfg.get_double_or("market", "horizon", 1.0));
        } else {
            std::size_t n = 0;
            const auto sigma = cfg.get_matrix("market", "sigma", n);
            const auto mu = cfg.get_vector("market", "mu");
            if (mu.size() != n) throw ConfigError("[market] mu length must match sigma dimension");
            in.market = MarketParams(sigma, mu, cfg.get_double_or("market", "rate", 0.0),
                                     cfg.get_double_or("market", "horizon", 1.0));
        }

        in.x_min = cfg.get_double_or("grid", "x_min", in.x_min);
        in.x_max = cfg.get_double_or("grid", "x_max", in.x_max);
        in.nx = static_cast<std::size_t>(cfg.get_int_or("grid", "nx", static_cast<long>(in.nx)));
        in.nt = static_cast<std::size_t>(cfg.get_int_or("grid", "nt", static_cast<long>(in.nt)));
        in.fd_nx = static_cast<std::size_t>(cfg.get_int_or("grid", "fd_nx", static_cast<long>(in.fd_nx)));
        in.fd_nt = static_cast<std::size_t>(cfg.get_int_or("grid", "fd_nt", static_cast<long>(in.fd_nt)));
        in.quad_order =
            static_cast<std::size_t>(cfg.get_int_or("grid", "quad_order", static_cast<long>(in.quad_order)));
        if (cfg.has("grid", "z_min") || cfg.has("grid", "z_max"))
            in.z_range = {cfg.get_double("grid", "z_min"), cfg.get_double("grid", "z_max")};
        if (!(in.x_min > 0.0) || !(in.x_max > in.x_min)) throw ConfigError("[grid] needs 0 < x_min < x_max");
        if (in.nx < 2 || in.nt < 2) throw ConfigError("[grid] nx and nt must be at least 2");

        in.checks = cfg.get_list_or("checks", "run");
        in.check_tol = cfg.get_double_or("checks", "tolerance", -1.0);
        in.lambda_sq_low = cfg.get_double_or("checks", "lambda_sq_low", in.lambda_sq_low);
        in.lambda_sq_high = cfg.get_double_or("checks", "lambda_sq_high", in.lambda_sq_high);
        if (cfg.has("utility", "r2_variant")) in.comparison_r2 = spec_from_section(cfg, "r2_");

        in.out_dir = cfg.get_or("output", "dir", in.out_dir.string());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return in;
}

}  // namespace blackrt
