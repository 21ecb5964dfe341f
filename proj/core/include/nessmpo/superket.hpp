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
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nessmpo/pauli.hpp"

namespace nessmpo {

/// Raised when the identity-string coefficient underflows; the represented
/// operator no longer has a usable trace.
class StateCollapseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank-3 real tensor A(left, s, right), s in 0..3, stored column-major with
/// the left bond index fastest. The same buffer is viewed either as a
/// (4*left) x right matrix (row = a + left*s) or as a left x (4*right)
/// matrix (column = s + 4*b).
class SiteTensor {
 public:
  using MatrixView = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixView = Eigen::Map<const Eigen::MatrixXd>;
  using Slice = Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>>;

  SiteTensor() = default;
  SiteTensor(Eigen::Index left, Eigen::Index right)
      : left_(left), right_(right), data_(Eigen::VectorXd::Zero(left * 4 * right)) {}

  static SiteTensor from_left_matrix(const Eigen::MatrixXd& m);
  static SiteTensor from_right_matrix(const Eigen::MatrixXd& m);

  Eigen::Index left() const { return left_; }
  Eigen::Index right() const { return right_; }

  MatrixView left_matrix() { return {data_.data(), left_ * 4, right_}; }
  ConstMatrixView left_matrix() const { return {data_.data(), left_ * 4, right_}; }
  MatrixView right_matrix() { return {data_.data(), left_, 4 * right_}; }
  ConstMatrixView right_matrix() const { return {data_.data(), left_, 4 * right_}; }

  /// left x right matrix A^s.
  Slice slice(int s) const {
    return Slice(data_.data() + left_ * s, left_, right_, Eigen::OuterStride<>(4 * left_));
  }

  double& operator()(Eigen::Index a, int s, Eigen::Index b) { return data_(a + left_ * (s + 4 * b)); }
  double operator()(Eigen::Index a, int s, Eigen::Index b) const {
    return data_(a + left_ * (s + 4 * b));
  }

  const Eigen::VectorXd& data() const { return data_; }
  Eigen::VectorXd& data() { return data_; }

 private:
  Eigen::Index left_ = 0;
  Eigen::Index right_ = 0;
  Eigen::VectorXd data_;
};

struct SchmidtSpectrum {
  int cut = 0;                  // bond index: sites [0, cut] | [cut+1, n)
  std::vector<double> values;   // descending, sum of squares = 1
};

/// -sum_j mu_j^2 log2 mu_j^2.
double osee(const SchmidtSpectrum& spectrum);

enum class SplitDirection { kRight, kLeft, kSymmetric };

/// Factorization used by two-site updates. kAuto sketches with a randomized
/// range finder when the matrix is at least twice the sketch size.
enum class SvdMethod { kAuto, kExact, kRandomized };

/// One term of a Pauli string: operator p on site (0-based).
struct PauliFactor {
  int site;
  PauliIndex op;
};

/// Density operator of n spins written as a matrix-product superket over
/// Pauli strings: rho = sum_s c_s sigma^s with
/// c_s = A_0^{s_0} A_1^{s_1} ... A_{n-1}^{s_{n-1}} (edge bonds of dimension 1).
/// Sites and bonds are 0-based; bond b joins sites b and b+1.
///
/// The library keeps the identity-string coefficient at 1, so tr(rho) = 2^n
/// and <sigma^s> = c_s.
class SuperketMps {
 public:
  /// Product state from per-site Pauli coefficient 4-vectors. Each vector
  /// must have a non-zero identity component.
  static SuperketMps product_state(std::span<const Eigen::Vector4d> local_coeffs);

  /// Assemble from raw parts (checkpoint loading, tests). Validates shapes.
  static SuperketMps from_parts(std::vector<SiteTensor> tensors, std::vector<Eigen::VectorXd> lambdas,
                                std::optional<int> center, int dmax, double discarded_weight_total);

  int size() const { return static_cast<int>(tensors_.size()); }
  const SiteTensor& tensor(int site) const { return tensors_.at(static_cast<std::size_t>(site)); }
  SiteTensor& mutable_tensor(int site);
  const Eigen::VectorXd& bond_lambdas(int bond) const {
    return lambdas_.at(static_cast<std::size_t>(bond));
  }
  Eigen::Index bond_dim(int bond) const { return tensor(bond).right(); }
  Eigen::Index max_bond_dim() const;
  std::optional<int> canonical_center() const { return center_; }
  int dmax() const { return dmax_; }
  void set_dmax(int d) { dmax_ = d; }
  double discarded_weight_total() const { return discarded_total_; }

  /// Contract the Pauli index of one site with a 4x4 propagator. Drops the
  /// canonical center unless the gate acts on it.
  void apply_one_site_gate(int site, const Eigen::Ref<const Eigen::MatrixXd>& g);

  /// Apply a 16x16 propagator on (bond, bond+1), refactor by SVD and
  /// truncate. Returns the relative discarded weight. If the state has a
  /// canonical center it is first moved next to the bond; with kSymmetric
  /// the split is local and the canonical center is dropped.
  double apply_two_site_gate(int bond, const Eigen::Ref<const Eigen::MatrixXd>& g, int dmax,
                             double trunc_eps, SplitDirection split = SplitDirection::kRight,
                             SvdMethod method = SvdMethod::kAuto);

  struct BondGate {
    int bond;
    const Eigen::MatrixXd* gate;
  };

  /// Gates on pairwise disjoint bonds, factored concurrently with local
  /// symmetric splits (the canonical center is dropped). Returns the summed
  /// discarded weight.
  double apply_disjoint_two_site_gates(std::span<const BondGate> gates, int dmax, double trunc_eps,
                                       int max_threads, SvdMethod method = SvdMethod::kAuto);

  /// Shift the orthogonality center with QR steps. Requires a center.
  void move_center(int site);

  /// Full reorthogonalization about `center`, refreshing every bond's
  /// Schmidt vector. Optional truncation (dmax, eps) is optimal here since
  /// it happens during the right-to-left SVD sweep.
  void canonicalize(int center, std::optional<std::pair<int, double>> truncation = std::nullopt);

  /// Exact Schmidt spectrum across `cut`; moves the center to site `cut`.
  SchmidtSpectrum schmidt_spectrum(int cut);
  double osee(int cut) { return nessmpo::osee(schmidt_spectrum(cut)); }

  /// Raw coefficient of a Pauli string (unnormalized).
  double coefficient(std::span<const PauliFactor> string) const;
  double identity_coefficient() const { return coefficient({}); }

  /// tr(sigma^string rho) / tr(rho).
  double expect_pauli_string(std::span<const PauliFactor> string) const;

  /// Rescale so the identity coefficient is 1. Returns the coefficient
  /// before rescaling. Throws StateCollapseError below 1e-300.
  double renormalize_identity();

  /// Euclidean norm of the coefficient vector.
  double norm() const;

  /// All 4^n coefficients (site 0 least significant). Small n only.
  Eigen::VectorXd to_dense() const;

 private:
  void shift_right(int site, bool update_lambda);
  void shift_left(int site, bool update_lambda);
  void check_site(int site) const;
  void check_bond(int bond) const;

  std::vector<SiteTensor> tensors_;
  std::vector<Eigen::VectorXd> lambdas_;
  std::optional<int> center_;
  int dmax_ = 80;
  double discarded_total_ = 0.0;
};

/// Cached left/right contractions of identity selectors; turns local string
/// expectations into O(D^2) work. Invalidated by any state change.
class IdentityEnvironments {
 public:
  explicit IdentityEnvironments(const SuperketMps& state);

  /// Expectation of sigma^{ops[0]}_{first} sigma^{ops[1]}_{first+1} ...
  double expect(int first_site, std::span<const PauliIndex> ops) const;

 private:
  const SuperketMps* state_;
  std::vector<Eigen::RowVectorXd> left_;  // left_[i]: contraction of sites < i
  std::vector<Eigen::VectorXd> right_;    // right_[i]: contraction of sites >= i
  double identity_ = 1.0;
};

}  // namespace nessmpo
