// Batch experiment runner behind the CLI: dispatches a parsed config to the
// library, persists manifests, reports, and CSV data, and aggregates
// machine-readable pass/fail checks.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlphase/config.hpp"

namespace nlphase {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct RunOptions {
  std::string out_dir = "nlphase-out";
  std::uint64_t seed = 12345;
  int threads = 1;
  std::map<std::string, double> tolerance_overrides;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct RunResult {
  bool all_pass = true;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;  // files written, relative to out_dir
};

// key = value lines of numeric overrides (e.g. "slice.rel_err = 0.02")
std::map<std::string, double> load_tolerance_overrides(const std::string& path);

// Runs one experiment; throws std::invalid_argument for config problems and
// std::runtime_error for execution failures. Always writes manifest.json and
// summary.json (also on check failure).
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

}  // namespace nlphase
