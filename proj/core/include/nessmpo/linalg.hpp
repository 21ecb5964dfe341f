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

#include <Eigen/Dense>

namespace nessmpo::linalg {

struct Svd {
  Eigen::MatrixXd u;       // m x k
  Eigen::VectorXd s;       // k, descending
  Eigen::MatrixXd vt;      // k x n
};

/// Thin SVD, k = min(m, n). Uses LAPACK dgesdd and falls back to Eigen's
/// BDCSVD if the divide-and-conquer driver does not converge.
Svd thin_svd(const Eigen::MatrixXd& a);

/// Leading singular triplets by a Gaussian range sketch of rank + oversample
/// columns refined with power iterations. Deterministic for a given seed.
/// Returns min(rank + oversample, m, n) triplets.
Svd randomized_svd(const Eigen::MatrixXd& a, Eigen::Index rank, Eigen::Index oversample, int power_iters,
                   std::uint64_t seed);

/// Singular values only.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

struct Qr {
  Eigen::MatrixXd q;  // m x k, orthonormal columns
  Eigen::MatrixXd r;  // k x n
};

/// Thin QR, k = min(m, n).
Qr thin_qr(const Eigen::MatrixXd& a);

struct TruncationResult {
  Eigen::Index kept = 0;
  double discarded_weight = 0.0;  // relative: sum of discarded s^2 / sum of all s^2
};

/// Smallest rank whose relative discarded weight is <= eps, capped at
/// max_rank and at least 1.
TruncationResult choose_rank(const Eigen::VectorXd& s, Eigen::Index max_rank, double eps);

/// Same rule when s holds only the leading part of the spectrum and
/// total_sq is the squared Frobenius norm of the whole matrix.
TruncationResult choose_rank(const Eigen::VectorXd& s, Eigen::Index max_rank, double eps, double total_sq);

}  // namespace nessmpo::linalg
