// Copyright 2026 The nessmpo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nessmpo/config.hpp"
#include "nessmpo/observables.hpp"
#include "nessmpo/superket.hpp"

namespace nessmpo::runner {

enum ExitCode : int {
  kConverged = 0,
  kUsageError = 1,
  kNotConverged = 2,
  kNumericalFailure = 3,
};

struct RunResult {
  int exit_code = kUsageError;
  bool converged = false;
  double t = 0.0;
  Eigen::Index d_final = 0;
  double osee_center = 0.0;
  TransportReport report;
  std::vector<double> schmidt;
  std::string error;
};

/// Starting superket selected by evolve.initial.
SuperketMps initial_state(const RunConfig& config);

/// Evolve to the steady state and write profile.csv, current.csv,
/// schmidt.csv, summary.json, diagnostics.csv and checkpoint.bin into
/// out_dir (created if missing).
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Continue from a checkpoint. Overrides are applied to the embedded config;
/// a changed model/bath digest is refused unless `force`.
RunResult resume(const std::filesystem::path& checkpoint, const Overrides& overrides, bool force,
                 const std::filesystem::path& out_dir, std::ostream& log);

/// Recompute observables and artifacts from a checkpoint without evolving.
RunResult observe(const std::filesystem::path& checkpoint, const std::filesystem::path& out_dir);

/// Dense steady state (n <= 6) with the same artifacts, tagged "oracle".
RunResult run_oracle(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

struct CompareResult {
  double t = 0.0;
  std::map<std::string, double> deviation;  // observable -> max |mpo - oracle|
  double max_deviation = 0.0;
};

/// Evolve the same initial state to evolve.t_max with both the MPO engine
/// (bond dimension evolve.dmax_cap) and dense integration (n <= 5).
CompareResult compare(const RunConfig& config, std::ostream& log);

/// One run per chain length, at most `jobs` at a time, into out_dir/n<N>;
/// writes out_dir/aggregate.csv. Returns the worst member exit code.
int sweep(const RunConfig& base, const std::vector<int>& sizes, int jobs, const std::filesystem::path& out_dir,
          std::ostream& log);

}  // namespace nessmpo::runner
