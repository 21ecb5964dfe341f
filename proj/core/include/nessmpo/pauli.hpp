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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nessmpo {

using Complex = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Index into the single-site Pauli basis {1, sx, sy, sz}.
class PauliIndex {
 public:
  constexpr PauliIndex() = default;
  explicit PauliIndex(int value);

  constexpr int value() const { return value_; }
  constexpr bool operator==(const PauliIndex&) const = default;

  static constexpr PauliIndex identity() { return PauliIndex(Raw{0}); }
  static constexpr PauliIndex x() { return PauliIndex(Raw{1}); }
  static constexpr PauliIndex y() { return PauliIndex(Raw{2}); }
  static constexpr PauliIndex z() { return PauliIndex(Raw{3}); }

 private:
  struct Raw {
    std::uint8_t v;
  };
  constexpr explicit PauliIndex(Raw r) : value_(r.v) {}
  std::uint8_t value_ = 0;
};

/// sigma^a sigma^b = phase * sigma^index
struct PauliProduct {
  Complex phase;
  PauliIndex index;
};

PauliProduct pauli_multiply(PauliIndex a, PauliIndex b);

/// 2x2 matrix of a single Pauli operator (basis state 0 = spin up).
const Eigen::Matrix2cd& pauli_matrix(PauliIndex p);

/// Pauli basis for one (4 elements) or two (16 elements) sites. Two-site
/// element alpha = a1 + 4*a2 is sigma^{a1} on the first site times sigma^{a2}
/// on the second; the first site is the least significant factor of the
/// 4x4 matrix index.
const std::vector<CMatrix>& pauli_basis(int nsites);

/// Dense operator on one or two spins.
class LocalOperator {
 public:
  explicit LocalOperator(CMatrix entries);

  /// Two-site product first (x) second, in the first-site-least-significant
  /// convention used everywhere in the library.
  static LocalOperator product(const LocalOperator& first, const LocalOperator& second);
  static LocalOperator identity(int nsites);
  static LocalOperator pauli(PauliIndex p);

  int dim() const { return static_cast<int>(entries_.rows()); }
  int nsites() const { return dim() == 2 ? 1 : 2; }
  const CMatrix& matrix() const { return entries_; }

  bool is_hermitian(double tol = 1e-14) const;

  LocalOperator adjoint() const { return LocalOperator(entries_.adjoint()); }
  LocalOperator operator+(const LocalOperator& o) const;
  LocalOperator operator-(const LocalOperator& o) const;
  LocalOperator operator*(const LocalOperator& o) const;
  friend LocalOperator operator*(Complex s, const LocalOperator& o);

 private:
  CMatrix entries_;
};

/// Real matrix acting on Pauli coefficient vectors of one or two sites.
class LocalSuperop {
 public:
  explicit LocalSuperop(RMatrix entries);

  int nsites() const { return entries_.rows() == 4 ? 1 : 2; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  const RMatrix& matrix() const { return entries_; }

  LocalSuperop operator+(const LocalSuperop& o) const;
  LocalSuperop operator*(double s) const;

 private:
  RMatrix entries_;
};

/// c_s = tr((sigma^s)^dagger op) / dim.
CVector operator_to_coeffs(const LocalOperator& op);

/// Inverse of operator_to_coeffs: op = sum_s c_s sigma^s.
LocalOperator coeffs_to_operator(const CVector& coeffs);

/// Real Pauli-basis matrix of rho -> -i[h, rho]. Throws on non-Hermitian h.
LocalSuperop hamiltonian_superop(const LocalOperator& h);

/// Real Pauli-basis matrix of
/// rho -> gamma * sum_k ([L_k rho, L_k^dag] + [L_k, rho L_k^dag]).
LocalSuperop dissipator_superop(std::span<const LocalOperator> ls, double gamma);

/// exp(m * tau). If row 0 of m vanishes, row 0 of the result is set to e_0^T
/// exactly.
LocalSuperop superop_exponential(const LocalSuperop& m, double tau);

}  // namespace nessmpo
