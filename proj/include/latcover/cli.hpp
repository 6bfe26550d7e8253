#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace latcover::cli {

inline constexpr const char* kVersion = "latcover 0.1.0";

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kValidation = 2,
  kBudget = 3,
  kCoverage = 4,
};

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string versions = kVersion;
  std::vector<std::string> outputs;
  std::int64_t wall_time_ms = 0;

  std::string to_json() const;
};

/// Parses argv, runs one subcommand and returns the process exit status.
/// JSON goes to `out` (or --out FILE); the manifest and diagnostics go to
/// `err` (or --manifest FILE).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace latcover::cli
