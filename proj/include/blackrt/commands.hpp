#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "blackrt/run_config.hpp"

namespace blackrt {

struct CommandOptions {
    std::optional<std::string> out_dir;
    bool emit_h = false;
    bool square = false;
    std::optional<long> nx;
    std::optional<long> nt;
    std::optional<long> quad_order;
};

// Exit-status contract: 0 all good, 1 at least one check failed, 2 usage or
// configuration error (ConfigError propagates to the entry point).
int cmd_solve(const RunInputs& in, const CommandOptions& opts);
int cmd_oracle(const RunInputs& in, const CommandOptions& opts);
int cmd_check(const RunInputs& in, const CommandOptions& opts);
int cmd_policy(const RunInputs& in, const CommandOptions& opts);
int cmd_report(const RunInputs& in, const CommandOptions& opts);

RunInputs load_inputs(const std::filesystem::path& config_path, const CommandOptions& opts);

}  // namespace blackrt
