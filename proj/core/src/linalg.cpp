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

#include "nessmpo/linalg.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include <lapacke.h>

namespace nessmpo::linalg {

namespace {

Svd eigen_svd(const Eigen::MatrixXd& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
}

}  // namespace

Svd thin_svd(const Eigen::MatrixXd& a) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  if (k == 0) throw std::invalid_argument("thin_svd: empty matrix");
  Svd out{Eigen::MatrixXd(m, k), Eigen::VectorXd(k), Eigen::MatrixXd(k, n)};
  Eigen::MatrixXd work = a;
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                                         out.s.data(), out.u.data(), m, out.vt.data(), k);
  if (info != 0) return eigen_svd(a);
  return out;
}

Svd randomized_svd(const Eigen::MatrixXd& a, Eigen::Index rank, Eigen::Index oversample, int power_iters,
                   std::uint64_t seed) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index l = std::min({rank + oversample, m, n});
  if (l <= 0) throw std::invalid_argument("randomized_svd: empty sketch");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd omega(n, l);
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = normal(rng);
  }
  Eigen::MatrixXd q = thin_qr(a * omega).q;
  for (int it = 0; it < power_iters; ++it) {
    const Eigen::MatrixXd z = thin_qr(a.transpose() * q).q;
    q = thin_qr(a * z).q;
  }
  Svd small = thin_svd(q.transpose() * a);
  small.u = q * small.u;
  return small;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Eigen::VectorXd s(k);
  Eigen::MatrixXd work = a;
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) return Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
  return s;
}

Qr thin_qr(const Eigen::MatrixXd& a) {
  const Eigen::Index k = std::min(a.rows(), a.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Qr out;
  out.q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

TruncationResult choose_rank(const Eigen::VectorXd& s, Eigen::Index max_rank, double eps) {
  const Eigen::Index len = s.size();
  if (len == 0) return {};
  const double total = s.squaredNorm();
  if (total == 0.0) return {1, 0.0};
  // Tail sums accumulated from the smallest value up for accuracy.
  Eigen::Index kept = len;
  double tail = 0.0;
  while (kept > 1) {
    const double next = tail + s(kept - 1) * s(kept - 1);
    if (next > eps * total) break;
    tail = next;
    --kept;
  }
  kept = std::clamp<Eigen::Index>(kept, 1, std::max<Eigen::Index>(1, max_rank));
  double discarded = 0.0;
  for (Eigen::Index j = len - 1; j >= kept; --j) discarded += s(j) * s(j);
  return {kept, discarded / total};
}

TruncationResult choose_rank(const Eigen::VectorXd& s, Eigen::Index max_rank, double eps, double total_sq) {
  const Eigen::Index len = s.size();
  if (len == 0) return {};
  if (!(total_sq > 0.0)) return {1, 0.0};
  const double unseen = std::max(0.0, total_sq - s.squaredNorm());
  Eigen::Index kept = len;
  double tail = unseen;
  while (kept > 1) {
    const double next = tail + s(kept - 1) * s(kept - 1);
    if (next > eps * total_sq) break;
    tail = next;
    --kept;
  }
  kept = std::clamp<Eigen::Index>(kept, 1, std::max<Eigen::Index>(1, max_rank));
  double discarded = 0.0;
  for (Eigen::Index j = len - 1; j >= kept; --j) discarded += s(j) * s(j);
  return {kept, (discarded + unseen) / total_sq};
}

}  // namespace nessmpo::linalg
