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
#include <span>
#include <stdexcept>
#include <vector>

#include "nessmpo/baths.hpp"
#include "nessmpo/models.hpp"
#include "nessmpo/pauli.hpp"

namespace nessmpo::oracle {

constexpr int kMaxSites = 6;

/// Raised when the steady state is not unique.
class DegenerateNessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full generator on 4^n Pauli-string coefficients; string index
/// sum_i s_i 4^i (site 0 least significant).
struct DenseLiouvillean {
  int n = 0;
  RMatrix matrix;
};

/// One- or two-site operator placed on sites [first_site, first_site + k).
struct PlacedOperator {
  int first_site;
  LocalOperator op;
  double rate = 1.0;  // dissipator prefactor; ignored for Hamiltonian terms
};

/// Builds -i[H, .] + sum_k rate_k (2 L rho L^dag - {L^dag L, rho}) directly
/// from Pauli-string products.
DenseLiouvillean dense_liouvillean(int n, std::span<const PlacedOperator> hamiltonian,
                                   std::span<const PlacedOperator> jumps);

DenseLiouvillean dense_liouvillean(const ModelSpec& model, const std::optional<BathSpec>& bath);

/// Lindblad operators of the chain baths placed on the edge sites.
std::vector<PlacedOperator> bath_jump_operators(const ModelSpec& model, const BathSpec& bath);

/// Smallest eigenvalue of a trace-one steady state still accepted as positive.
constexpr double kPositivityFloor = -1e-8;

struct NessResult {
  RVector coeffs;           // identity coefficient 1
  double residual = 0.0;    // max |L c|
  double min_eigenvalue = 0.0;  // of the reconstructed density matrix
};

/// Solves L c = 0 with c_0 = 1 on the complement of the identity string.
/// Throws DegenerateNessError when that block is numerically singular.
NessResult ness_nullspace(const DenseLiouvillean& liou);

struct IntegrationControl {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double dt_initial = 1e-3;
};

/// Dormand-Prince integration of dc/dt = L c from 0 to t.
RVector time_integrate(const DenseLiouvillean& liou, const RVector& coeffs0, double t,
                       const IntegrationControl& ctrl = {});

/// All eigenvalues (n <= 5).
CVector liouvillean_spectrum(const DenseLiouvillean& liou);

/// Product-state coefficient vector from per-site 4-vectors.
RVector product_coeffs(std::span<const Eigen::Vector4d> local);

/// Density matrix sum_s c_s sigma^s / (c_0 2^n), basis bit i = site i.
CMatrix density_matrix(const RVector& coeffs, int n);

/// <sigma^string> for a string given as per-site Pauli indices.
double expect(const RVector& coeffs, std::span<const int> string);

std::vector<double> spin_profile(const RVector& coeffs, int n);
std::vector<double> spin_current_profile(const RVector& coeffs, int n);
std::vector<double> energy_density_profile(const RVector& coeffs, int n, std::span<const LocalOperator> bond_terms);
std::vector<double> energy_current_profile(const RVector& coeffs, int n, double hx);

/// Normalized Schmidt values across bond `cut` of the coefficient vector.
std::vector<double> schmidt_values(const RVector& coeffs, int n, int cut);

}  // namespace nessmpo::oracle
