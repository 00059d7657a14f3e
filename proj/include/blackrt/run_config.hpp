#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blackrt/market.hpp"
#include "blackrt/preferences.hpp"

namespace blackrt {

// Parsed form of the run configuration: [section] headers, key = value
// lines, # comments. Matrices are semicolon-separated rows.
class RunConfig {
public:
    static RunConfig parse_file(const std::filesystem::path& path);
    static RunConfig parse_text(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    long get_int_or(const std::string& section, const std::string& key, long fallback) const;
    std::vector<double> get_vector(const std::string& section, const std::string& key) const;
    // Row-major matrix from "a b; c d"; must be square with matching rows.
    std::vector<double> get_matrix(const std::string& section, const std::string& key, std::size_t& n) const;
    std::vector<std::string> get_list_or(const std::string& section, const std::string& key) const;

    const std::filesystem::path& base_dir() const { return base_dir_; }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::filesystem::path base_dir_;
    std::string origin_;
};

// Config error carrying the exit-status contract's usage meaning.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Assembled run inputs.
struct RunInputs {
    UtilitySpec spec = UtilitySpec::exp_sum({{1.0, 1.0}});
    MarketParams market = MarketParams::from_lambda_sq(0.0, 1.0);
    // grid section
    double x_min = 0.1, x_max = 50.0;
    std::size_t nx = 201, nt = 11;
    std::size_t fd_nx = 512, fd_nt = 512;
    std::size_t quad_order = 128;
    std::optional<std::pair<double, double>> z_range;
    // checks section
    std::vector<std::string> checks;
    double check_tol = -1.0;  // negative: per-surface default
    std::optional<UtilitySpec> comparison_r2;
    double lambda_sq_low = 0.04, lambda_sq_high = 0.09;
    // output section
    std::filesystem::path out_dir = "out";
};

RunInputs build_inputs(const RunConfig& cfg);

}  // namespace blackrt
