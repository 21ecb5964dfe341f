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

#include "nessmpo/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nessmpo {

namespace {

constexpr PauliIndex kX = PauliIndex::x();
constexpr PauliIndex kY = PauliIndex::y();
constexpr PauliIndex kZ = PauliIndex::z();

double two_site_from_env(const IdentityEnvironments& env, int site, const CVector& coeffs) {
  double value = 0.0;
  for (int a = 0; a < 16; ++a) {
    const Complex c = coeffs(a);
    if (std::abs(c) < 1e-15) continue;
    const std::array<PauliIndex, 2> ops{PauliIndex(a % 4), PauliIndex(a / 4)};
    value += c.real() * env.expect(site, ops);
  }
  return value;
}

}  // namespace

std::vector<double> spin_profile(const SuperketMps& state) {
  const IdentityEnvironments env(state);
  std::vector<double> s(static_cast<std::size_t>(state.size()));
  const std::array<PauliIndex, 1> z{kZ};
  for (int l = 0; l < state.size(); ++l) s[static_cast<std::size_t>(l)] = env.expect(l, z);
  return s;
}

std::vector<double> spin_current_profile(const SuperketMps& state) {
  const IdentityEnvironments env(state);
  std::vector<double> j;
  const std::array<PauliIndex, 2> xy{kX, kY};
  const std::array<PauliIndex, 2> yx{kY, kX};
  for (int l = 0; l + 1 < state.size(); ++l) j.push_back(env.expect(l, xy) - env.expect(l, yx));
  return j;
}

double expect_two_site(const SuperketMps& state, int site, const LocalOperator& op) {
  if (op.dim() != 4) throw std::invalid_argument("expect_two_site: operator must be 4x4");
  const IdentityEnvironments env(state);
  return two_site_from_env(env, site, operator_to_coeffs(op));
}

std::vector<double> energy_density_profile(const SuperketMps& state, std::span<const LocalOperator> bond_terms) {
  if (static_cast<int>(bond_terms.size()) != state.size() - 1) {
    throw std::invalid_argument("energy_density_profile: expected " + std::to_string(state.size() - 1) +
                                " bond terms");
  }
  const IdentityEnvironments env(state);
  std::vector<double> e;
  for (int l = 0; l + 1 < state.size(); ++l) {
    e.push_back(two_site_from_env(env, l, operator_to_coeffs(bond_terms[static_cast<std::size_t>(l)])));
  }
  return e;
}

std::vector<double> energy_current_profile(const SuperketMps& state, double hx) {
  const IdentityEnvironments env(state);
  std::vector<double> j;
  const std::array<PauliIndex, 2> zy{kZ, kY};
  const std::array<PauliIndex, 2> yz{kY, kZ};
  for (int l = 1; l + 1 < state.size(); ++l) {
    j.push_back(2.0 * hx * (env.expect(l - 1, zy) - env.expect(l, yz)));
  }
  return j;
}

TransportSkips default_skips(const ModelSpec& model) {
  TransportSkips s{2, 2};
  if (model.kind == ModelKind::kTiltedIsing) {
    s = {4, 5};
  } else if (std::any_of(model.fields.begin(), model.fields.end(), [](double h) { return h != 0.0; })) {
    s = {5, 5};
  }
  // Short chains keep at least two sites.
  while ((2 * s.left >= model.n || model.n - s.left - s.right < 2) && s.left > 0) --s.left;
  while ((2 * s.right >= model.n || model.n - s.left - s.right < 2) && s.right > 0) --s.right;
  return s;
}

TransportReport fit_transport_coefficient(std::span<const double> profile, std::span<const double> currents,
                                          int current_first_label, int n, int skip_left, int skip_right) {
  if (skip_left < 0 || skip_right < 0 || 2 * skip_left >= n || 2 * skip_right >= n) {
    throw std::invalid_argument("transport fit: skip counts must be non-negative and below n/2");
  }
  const int kept = n - skip_left - skip_right;
  if (kept < 2) throw std::invalid_argument("transport fit: fewer than two retained sites");
  if (static_cast<int>(profile.size()) < n - skip_right) {
    throw std::invalid_argument("transport fit: profile too short for the requested skips");
  }
  if (currents.empty()) throw std::invalid_argument("transport fit: no currents");

  TransportReport r;
  r.profile.assign(profile.begin(), profile.end());
  r.currents.assign(currents.begin(), currents.end());
  r.current_first_label = current_first_label;
  r.n = n;
  r.skip_left = skip_left;
  r.skip_right = skip_right;

  const int last_label = current_first_label + static_cast<int>(currents.size()) - 1;
  int lo = std::max(skip_left + 1, current_first_label);
  int hi = std::min(n - skip_right - 1, last_label);
  if (lo > hi) {
    lo = current_first_label;
    hi = last_label;
  }
  double sum = 0.0;
  for (int l = lo; l <= hi; ++l) sum += currents[static_cast<std::size_t>(l - current_first_label)];
  r.mean_current = sum / (hi - lo + 1);
  double spread = 0.0;
  for (int l = lo; l <= hi; ++l) {
    spread = std::max(spread, std::abs(currents[static_cast<std::size_t>(l - current_first_label)] - r.mean_current));
  }
  r.current_spread = std::abs(r.mean_current) > 0.0 ? spread / std::abs(r.mean_current) : (spread > 0.0 ? INFINITY : 0.0);

  r.drop = profile[static_cast<std::size_t>(n - skip_right - 1)] - profile[static_cast<std::size_t>(skip_left)];
  r.gradient = r.drop / kept;
  if (std::abs(r.gradient) < 1e-3 * std::abs(r.mean_current)) {
    r.ballistic = true;
  } else if (r.gradient != 0.0) {
    r.kappa = -r.mean_current / r.gradient;
  }
  return r;
}

TransportReport transport_report(const SuperketMps& state, const ModelSpec& model, const TransportSkips& skips) {
  if (state.size() != model.n) throw std::invalid_argument("transport_report: state and model sizes differ");
  if (model.kind == ModelKind::kTiltedIsing) {
    const auto terms = build_bond_terms(model);
    return fit_transport_coefficient(energy_density_profile(state, terms), energy_current_profile(state, model.hx), 2,
                                     model.n, skips.left, skips.right);
  }
  return fit_transport_coefficient(spin_profile(state), spin_current_profile(state), 1, model.n, skips.left,
                                   skips.right);
}

ProbeSample probe_from_report(const TransportReport& report) {
  ProbeSample p;
  p.mean_current = report.mean_current;
  p.current_spread = report.current_spread;
  for (double j : report.currents) p.max_abs_current = std::max(p.max_abs_current, std::abs(j));
  p.profile_left = report.profile[static_cast<std::size_t>(report.skip_left)];
  p.profile_right = report.profile[static_cast<std::size_t>(report.n - report.skip_right - 1)];
  return p;
}

ConvergenceProbe make_transport_probe(const ModelSpec& model, const TransportSkips& skips) {
  return [model, skips](const SuperketMps& state) { return probe_from_report(transport_report(state, model, skips)); };
}

double linear_fit_residual(const TransportReport& report) {
  const int lo = report.skip_left + 1;
  const int hi = report.n - report.skip_right;
  const int m = hi - lo + 1;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int l = lo; l <= hi; ++l) {
    const double y = report.profile[static_cast<std::size_t>(l - 1)];
    sx += l;
    sy += y;
    sxx += static_cast<double>(l) * l;
    sxy += l * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / m;
  double worst = 0.0;
  for (int l = lo; l <= hi; ++l) {
    worst = std::max(worst, std::abs(report.profile[static_cast<std::size_t>(l - 1)] - (icpt + slope * l)));
  }
  return std::abs(report.drop) > 0.0 ? worst / std::abs(report.drop) : INFINITY;
}

}  // namespace nessmpo
