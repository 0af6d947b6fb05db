#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fishpath/config.hpp"

namespace fishpath::runner {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { ok = 0, validation_failure = 1, numerical_failure = 2 };

enum class LogLevel { quiet, info, debug };

/// Read from FISHPATH_LOG (quiet | info | debug); info when unset.
LogLevel log_level_from_env();

struct RunResult {
  int exit_code = ExitCode::ok;
  std::string message;
  std::vector<std::filesystem::path> files;
};

/// Runs the configured subcommand into config.output_dir. Failures remove the
/// files this run wrote and map to the exit codes above.
RunResult run(const config::RunConfig& config, LogLevel level = LogLevel::info);

}  // namespace fishpath::runner
