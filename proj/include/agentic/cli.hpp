#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "agentic/config.hpp"

namespace agentic {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBackendErrors = 2;

/// Entry point behind the `agentic` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env());

/// `agentic [subcommand] --help` text.
std::string cli_help(const std::string& subcommand = "");

}  // namespace agentic
