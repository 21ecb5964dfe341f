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

#include <optional>
#include <string_view>
#include <vector>

#include "nessmpo/models.hpp"
#include "nessmpo/pauli.hpp"

namespace nessmpo {

enum class BathKind { kSingleSpin, kTwoSpin };
enum class ChainEnd { kLeft, kRight };

std::string_view to_string(BathKind kind);
BathKind parse_bath_kind(std::string_view text);

/// Boundary driving. Single-spin baths use the magnetization potentials
/// mu_left/mu_right; two-spin baths target Gibbs states of the edge bond
/// term at t_left/t_right unless an explicit 4x4 target is given.
struct BathSpec {
  BathKind kind = BathKind::kSingleSpin;
  double gamma = 1.0;
  double mu_left = 0.0;
  double mu_right = 0.0;
  double t_left = 1.0;
  double t_right = 1.0;
  std::optional<CMatrix> target_left;
  std::optional<CMatrix> target_right;

  static BathSpec single_spin(double mu_left, double mu_right, double gamma = 1.0);
  static BathSpec two_spin(double t_left, double t_right, double gamma = 2.0);

  void validate() const;
};

struct SingleSpinRates {
  double gamma_plus;
  double gamma_minus;
};

/// Gamma_pm = sqrt((1 -+ tanh mu) / (1 +- tanh mu)) = exp(-+mu).
SingleSpinRates single_spin_rates(double mu);

/// L1 = sqrt(G+) (sx + i sy)/2, L2 = sqrt(G-) (sx - i sy)/2.
std::vector<LocalOperator> single_spin_lindblad_operators(double mu);

LocalSuperop single_spin_bath_generator(double mu, double gamma);

/// Closed-form exp(generator * tau) for the single-spin bath.
LocalSuperop single_spin_bath_propagator(double mu, double gamma, double tau);

/// Pauli coefficients (1, 0, 0, -tanh mu) of the bath fixed point.
Eigen::Vector4d single_spin_fixed_point(double mu);

/// R_ab = tr(V^dag sigma^a V sigma^b) / 4 on two sites.
RMatrix pauli_rotation(const CMatrix& v);

/// Two-spin bath generator with unique fixed point rho_b and every other
/// eigenvalue equal to -gamma. rho_b must be Hermitian, positive
/// semidefinite and of unit trace.
LocalSuperop two_spin_bath_generator(const CMatrix& rho_b, double gamma);

/// The 16 Lindblad operators realizing two_spin_bath_generator at gamma = 1,
/// already rotated into the eigenbasis of rho_b.
std::vector<LocalOperator> two_spin_lindblad_operators(const CMatrix& rho_b);

/// exp(-h/T) / tr exp(-h/T).
CMatrix thermal_two_site_state(const LocalOperator& h, double temperature);

/// Target state for one end of a two-spin bath: explicit override or the
/// Gibbs state of the corresponding edge bond term.
CMatrix two_spin_target(const BathSpec& bath, const ModelSpec& model, ChainEnd end);

/// Throws unless rho is a valid 4x4 density matrix (tolerance 1e-10).
/// Returns the smallest eigenvalue.
double validate_two_site_density(const CMatrix& rho);

}  // namespace nessmpo
