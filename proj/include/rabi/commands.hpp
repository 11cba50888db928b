#pragma once

// verify / simulate / compare: each returns an exit code, a JSON report and
// the files it wrote.

#include "rabi/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace rabi::commands {

enum ExitCode : int { kOk = 0, kFail = 1, kConfigError = 2, kUnsupported = 3, kIoError = 4 };

struct Outcome {
  int exit_code = kOk;
  std::string report; // JSON
  std::vector<std::filesystem::path> files;
};

/// Constants of motion, block structure and the projection oracle on the full model.
Outcome verify(const scenario::ScenarioConfig &cfg, const std::filesystem::path &out_dir);
/// Propagates the scenario and writes <name>.csv.
Outcome simulate(const scenario::ScenarioConfig &cfg, const std::filesystem::path &out_dir);
/// Numeric series against the closed forms; writes <name>_analytic.csv.
Outcome compare(const scenario::ScenarioConfig &cfg, const std::filesystem::path &out_dir);

/// Why a scenario has no closed-form counterpart; empty when it has one.
std::string compare_unsupported_reason(const scenario::ScenarioConfig &cfg);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

/// CSV text of a trajectory: t, extra time columns, then every series.
std::string csv_text(const scenario::PreparedRun &run, const dynamics::Trajectory &tr);

} // namespace rabi::commands
