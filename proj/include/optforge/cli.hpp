#pragma once

#include "optforge/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace optforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Data goes to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_environment());

/// Builds the effective configuration: defaults, then the config file named by
/// `config_path` or OPTFORGE_CONFIG, then the environment. Flags are applied by
/// the caller afterwards.
ToolConfig load_config(const std::optional<std::string>& config_path, const EnvLookup& env);

} // namespace optforge::cli
