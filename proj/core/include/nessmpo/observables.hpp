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

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nessmpo/models.hpp"
#include "nessmpo/superket.hpp"

namespace nessmpo {

/// S_l = <sz_l>, one value per site.
std::vector<double> spin_profile(const SuperketMps& state);

/// j_l = <sx_l sy_{l+1} - sy_l sx_{l+1}>, one value per bond. Positive
/// values transport magnetization to the right.
std::vector<double> spin_current_profile(const SuperketMps& state);

/// eps_l = <h_{l,l+1}>, one value per bond.
std::vector<double> energy_density_profile(const SuperketMps& state, std::span<const LocalOperator> bond_terms);

/// j_l = 2 hx <sz_{l-1} sy_l - sy_l sz_{l+1}> for interior sites l = 1..n-2
/// (0-based); the result has n-2 entries.
std::vector<double> energy_current_profile(const SuperketMps& state, double hx);

/// Expectation of a two-site operator on (site, site+1) from its Pauli
/// expansion.
double expect_two_site(const SuperketMps& state, int site, const LocalOperator& op);

struct TransportSkips {
  int left = 2;
  int right = 2;
};

/// Default boundary skips for a model: 2/2 for uniform XXZ, 5/5 for XXZ with
/// a non-zero field pattern and 4/5 bonds for tilted Ising, reduced on
/// chains too short to keep two sites.
TransportSkips default_skips(const ModelSpec& model);

struct TransportReport {
  std::vector<double> profile;
  std::vector<double> currents;
  int current_first_label = 1;  // 1-based label of currents[0]
  int n = 0;
  int skip_left = 0;
  int skip_right = 0;
  double mean_current = 0.0;
  double current_spread = 0.0;  // max |j_l - j| / |j| over the retained range
  double drop = 0.0;
  double gradient = 0.0;
  std::optional<double> kappa;  // empty when ballistic
  bool ballistic = false;
};

/// Labels are 1-based: the profile entry with label l is profile[l-1] and
/// the current with label l is currents[l - current_first_label].
/// drop = profile(n - skip_right) - profile(skip_left + 1),
/// gradient = drop / (n - skip_left - skip_right), kappa = -j / gradient
/// with j averaged over current labels skip_left+1 .. n-skip_right-1.
TransportReport fit_transport_coefficient(std::span<const double> profile, std::span<const double> currents,
                                          int current_first_label, int n, int skip_left, int skip_right);

/// Profile and current appropriate for the model: magnetization and spin
/// current for XXZ, bond energy and energy current for tilted Ising.
TransportReport transport_report(const SuperketMps& state, const ModelSpec& model, const TransportSkips& skips);

struct ProbeSample {
  double mean_current = 0.0;
  double current_spread = 0.0;
  double max_abs_current = 0.0;
  double profile_left = 0.0;
  double profile_right = 0.0;
};

using ConvergenceProbe = std::function<ProbeSample(const SuperketMps&)>;

ProbeSample probe_from_report(const TransportReport& report);
ConvergenceProbe make_transport_probe(const ModelSpec& model, const TransportSkips& skips);

/// Linear least-squares fit of the profile over the retained range; returns
/// the maximal residual divided by |drop|.
double linear_fit_residual(const TransportReport& report);

}  // namespace nessmpo
