#pragma once

#include <string>
#include <vector>

namespace fogcache::cli {

// Exit codes of the fogcache tool.
enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kIoError = 2,
  kInfeasibleTarget = 3,
};

// Environment variables consulted when the matching flag is absent from the
// command line. They take precedence over values from --config.
inline constexpr const char* kOutputDirEnv = "FOGCACHE_OUTPUT_DIR";
inline constexpr const char* kJobsEnv = "FOGCACHE_JOBS";

int run(int argc, char** argv);

// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace fogcache::cli
