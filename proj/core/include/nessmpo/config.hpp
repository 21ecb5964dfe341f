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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nessmpo/baths.hpp"
#include "nessmpo/models.hpp"
#include "nessmpo/observables.hpp"
#include "nessmpo/tebd.hpp"

namespace nessmpo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitialState { kMixed, kLinear };

/// Everything needed to reproduce one run. Grammar and key list are in
/// docs/formats.md.
struct RunConfig {
  struct Model {
    ModelKind kind = ModelKind::kXxz;
    int n = 16;
    double delta = 1.0;
    std::string field_pattern = "uniform";  // uniform | staggered | explicit
    std::vector<double> field_values;
    double hx = 3.375;
    double hz = 2.0;
  } model;

  struct Bath {
    BathKind kind = BathKind::kSingleSpin;
    std::optional<double> gamma;  // default 1 (single spin) or 2 (two spin)
    double mu_left = 0.0;
    double mu_right = 0.0;
    double t_left = 1.0;
    double t_right = 1.0;
    std::vector<double> target_left;   // 16 or 32 numbers, row-major
    std::vector<double> target_right;
  } bath;

  struct Evolve {
    double tau = 0.05;
    int order = 2;
    double t_max = 0.0;  // 0 means 20 n
    int dmax_init = 40;
    int dmax_cap = 80;
    int dmax_increment = 20;
    double grow_threshold = 1e-7;
    double trunc_eps = 1e-10;
    SvdMethod svd = SvdMethod::kAuto;
    bool parallel_bonds = false;
    int threads = 1;
    InitialState initial = InitialState::kLinear;  // mixed for two-spin baths
  } evolve;

  struct Convergence {
    double tol_uniformity = 0.02;
    double tol_drift = 0.005;
    double window = 10.0;
    double zero_current_floor = 1e-10;
  } convergence;

  struct Observe {
    std::optional<int> skip_left;
    std::optional<int> skip_right;
    /// (first bond label, distance of the last bond label from n) for the
    /// energy profile; (5, 5) selects bonds 5 and n-5.
    std::optional<std::pair<int, int>> energy_bond_endpoints;
  } observe;

  struct Output {
    std::string dir = "out";
    double checkpoint_every = 50.0;  // time units; 0 disables periodic checkpoints
  } output;

  ModelSpec model_spec() const;
  BathSpec bath_spec() const;
  TransportSkips skips() const;
  EvolveOptions evolve_options() const;

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// Parse config text. Errors carry "<source>:<line>: " prefixes.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Set one dotted key ("bath.mu_left") from its textual value.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Apply NESS_SECTION__KEY=value environment overrides.
void apply_env_overrides(RunConfig& config, char** envp);

/// Canonical, fully resolved text; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);

/// FNV-1a digest of the canonical model and bath sections.
std::uint64_t physics_digest(const RunConfig& config);

}  // namespace nessmpo
