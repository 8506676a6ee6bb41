/* Copyright 2026 The gbloch Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Run orchestration: evaluates a validated config, writes the output files
// and a run report, and maps failures onto process exit codes.

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbloch/config.hpp"
#include "gbloch/trajectory.hpp"

namespace gbloch {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3, kExitConsistency = 4 };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  ///< overrides output.directory
  std::optional<double> tolerance;               ///< overrides tolerance
  unsigned threads = 0;                          ///< stochastic workers; 0 = hardware concurrency
};

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::filesystem::path directory;
  std::vector<std::string> files;
};

/// Runs a validated config. Numeric failures throw NumericError.
RunOutcome run(const SimulationConfig& config, const RunOptions& options);

/// Reads, validates and runs a config file; never throws. Failures are
/// reported on `log` and, when possible, as a diagnostic report.json.
int run_file(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& log);

/// Validates a config file; returns kExitOk or kExitValidation.
int validate_file(const std::filesystem::path& config_path, std::ostream& log);

/// Rows of a CSV document; lines starting with '#' are comments.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;
};
CsvTable parse_csv(const std::string& text);

/// Multipole trajectory CSV: t, rho_<L>_<M>_re, rho_<L>_<M>_im per component in
/// flattened order, then optional standard-error columns.
std::string trajectory_csv(const Trajectory& traj, const std::string& prefix = "rho");
/// Reads back the rho columns written by trajectory_csv.
Trajectory trajectory_from_csv(const CsvTable& table, const SpinSystem& spin, const std::string& prefix = "rho");

/// Column name of one multipole component, e.g. rho_2_-1_re or rho_1_+1_im.
std::string component_column(const std::string& prefix, int L, int M, const char* part);

}  // namespace gbloch
