#pragma once

#include <string>
#include <vector>

namespace chronoslit {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 success, 1 validation or usage error, 2 a numerical check
/// exceeded its tolerance.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitCheckFailed = 2 };

/// Entry point of the `chronoslit` tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace chronoslit
