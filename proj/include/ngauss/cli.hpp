#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ngauss::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,
  kInvalidState = 3,
  kTruncationFailure = 4,
  kWrongKind = 5,
  kVerificationFailure = 6,
};

inline constexpr const char* kToolName = "ngauss";
inline constexpr const char* kToolVersion = "1.0.0";

/// Runs one command. JSON report to `out`, human summary and errors to `err`.
/// NONGAUSS_MAX_DIM in the environment overrides the dimension limit.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ngauss::cli
