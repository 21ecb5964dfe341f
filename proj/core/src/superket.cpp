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

#include "nessmpo/superket.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "nessmpo/linalg.hpp"

namespace nessmpo {

namespace {

Eigen::VectorXd normalized(const Eigen::VectorXd& s) {
  const double nrm = s.norm();
  return nrm > 0.0 ? Eigen::VectorXd(s / nrm) : s;
}

}  // namespace

SiteTensor SiteTensor::from_left_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() % 4 != 0) throw std::invalid_argument("from_left_matrix: rows not divisible by 4");
  SiteTensor t(m.rows() / 4, m.cols());
  t.left_matrix() = m;
  return t;
}

SiteTensor SiteTensor::from_right_matrix(const Eigen::MatrixXd& m) {
  if (m.cols() % 4 != 0) throw std::invalid_argument("from_right_matrix: cols not divisible by 4");
  SiteTensor t(m.rows(), m.cols() / 4);
  t.right_matrix() = m;
  return t;
}

double osee(const SchmidtSpectrum& spectrum) {
  double s = 0.0;
  for (double mu : spectrum.values) {
    const double p = mu * mu;
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

SuperketMps SuperketMps::product_state(std::span<const Eigen::Vector4d> local_coeffs) {
  if (local_coeffs.empty()) throw std::invalid_argument("product_state: empty chain");
  SuperketMps state;
  const int n = static_cast<int>(local_coeffs.size());
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector4d& v = local_coeffs[static_cast<std::size_t>(i)];
    if (!v.allFinite()) throw std::invalid_argument("product_state: non-finite coefficients");
    if (v(0) == 0.0) {
      throw std::invalid_argument("product_state: site " + std::to_string(i) +
                                  " has zero identity component");
    }
    // Every factor is scaled to c0 = 1; non-center sites are then unit
    // vectors and the center carries the accumulated norm.
    const Eigen::Vector4d w = v / v(0);
    const double nrm = w.norm();
    SiteTensor t(1, 1);
    for (int s = 0; s < 4; ++s) t(0, s, 0) = w(s) / nrm;
    scale *= nrm;
    state.tensors_.push_back(std::move(t));
  }
  state.tensors_[0].data() *= scale;
  state.lambdas_.assign(static_cast<std::size_t>(n - 1), Eigen::VectorXd::Ones(1));
  state.center_ = 0;
  return state;
}

SuperketMps SuperketMps::from_parts(std::vector<SiteTensor> tensors, std::vector<Eigen::VectorXd> lambdas,
                                    std::optional<int> center, int dmax,
                                    double discarded_weight_total) {
  const auto n = tensors.size();
  if (n == 0) throw std::invalid_argument("from_parts: empty chain");
  if (lambdas.size() != n - 1) throw std::invalid_argument("from_parts: wrong number of bond vectors");
  if (tensors.front().left() != 1 || tensors.back().right() != 1) {
    throw std::invalid_argument("from_parts: edge bonds must have dimension 1");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (tensors[i].right() != tensors[i + 1].left()) {
      throw std::invalid_argument("from_parts: bond dimension mismatch at bond " + std::to_string(i));
    }
  }
  if (center && (*center < 0 || *center >= static_cast<int>(n))) {
    throw std::invalid_argument("from_parts: center out of range");
  }
  SuperketMps state;
  state.tensors_ = std::move(tensors);
  state.lambdas_ = std::move(lambdas);
  state.center_ = center;
  state.dmax_ = dmax;
  state.discarded_total_ = discarded_weight_total;
  return state;
}

SiteTensor& SuperketMps::mutable_tensor(int site) {
  check_site(site);
  center_.reset();
  return tensors_[static_cast<std::size_t>(site)];
}

Eigen::Index SuperketMps::max_bond_dim() const {
  Eigen::Index d = 1;
  for (const auto& t : tensors_) d = std::max(d, t.right());
  return d;
}

void SuperketMps::check_site(int site) const {
  if (site < 0 || site >= size()) {
    throw std::out_of_range("site " + std::to_string(site) + " out of range [0, " +
                            std::to_string(size()) + ")");
  }
}

void SuperketMps::check_bond(int bond) const {
  if (bond < 0 || bond >= size() - 1) {
    throw std::out_of_range("bond " + std::to_string(bond) + " out of range [0, " +
                            std::to_string(size() - 1) + ")");
  }
}

void SuperketMps::apply_one_site_gate(int site, const Eigen::Ref<const Eigen::MatrixXd>& g) {
  check_site(site);
  if (g.rows() != 4 || g.cols() != 4) throw std::invalid_argument("one-site gate must be 4x4");
  SiteTensor& t = tensors_[static_cast<std::size_t>(site)];
  const Eigen::Matrix4d gt = g.transpose();
  for (Eigen::Index b = 0; b < t.right(); ++b) {
    Eigen::Map<Eigen::MatrixXd> block(t.data().data() + 4 * t.left() * b, t.left(), 4);
    block = (block * gt).eval();
  }
  if (center_ && *center_ != site) center_.reset();
}

namespace {

struct TwoSiteUpdate {
  SiteTensor a;
  SiteTensor b;
  Eigen::VectorXd lambda;
  double discarded = 0.0;
};

TwoSiteUpdate factor_two_site(const SiteTensor& a, const SiteTensor& b, const Eigen::Ref<const Eigen::MatrixXd>& g,
                              int dmax, double trunc_eps, SplitDirection split, SvdMethod method) {
  const Eigen::Index dl = a.left();
  const Eigen::Index dr = b.right();

  // theta(a + dl*s1, s2 + 4*c); for fixed c the 16*dl block is a dl x 16
  // matrix indexed by (a, s1 + 4*s2).
  Eigen::MatrixXd theta = a.left_matrix() * b.right_matrix();
  const Eigen::MatrixXd gt = g.transpose();
  for (Eigen::Index c = 0; c < dr; ++c) {
    Eigen::Map<Eigen::MatrixXd> block(theta.data() + 16 * dl * c, dl, 16);
    block = (block * gt).eval();
  }

  const Eigen::Index l = dmax + 16 + dmax / 10;
  const bool sketch = method == SvdMethod::kRandomized ||
                      (method == SvdMethod::kAuto && std::min(theta.rows(), theta.cols()) >= 2 * l);
  linalg::Svd svd;
  linalg::TruncationResult trunc;
  if (sketch) {
    const std::uint64_t seed = 0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(theta.rows()) << 32) ^
                               static_cast<std::uint64_t>(theta.cols());
    svd = linalg::randomized_svd(theta, dmax, l - dmax, 2, seed);
    trunc = linalg::choose_rank(svd.s, dmax, trunc_eps, theta.squaredNorm());
  } else {
    svd = linalg::thin_svd(theta);
    trunc = linalg::choose_rank(svd.s, dmax, trunc_eps);
  }
  const Eigen::Index k = trunc.kept;
  const Eigen::VectorXd s = svd.s.head(k);

  TwoSiteUpdate out;
  switch (split) {
    case SplitDirection::kRight:
      out.a = SiteTensor::from_left_matrix(svd.u.leftCols(k));
      out.b = SiteTensor::from_right_matrix(s.asDiagonal() * svd.vt.topRows(k));
      break;
    case SplitDirection::kLeft:
      out.a = SiteTensor::from_left_matrix(svd.u.leftCols(k) * s.asDiagonal());
      out.b = SiteTensor::from_right_matrix(svd.vt.topRows(k));
      break;
    case SplitDirection::kSymmetric: {
      const Eigen::VectorXd root = s.cwiseSqrt();
      out.a = SiteTensor::from_left_matrix(svd.u.leftCols(k) * root.asDiagonal());
      out.b = SiteTensor::from_right_matrix(root.asDiagonal() * svd.vt.topRows(k));
      break;
    }
  }
  out.lambda = normalized(s);
  out.discarded = trunc.discarded_weight;
  return out;
}

void check_two_site_args(const Eigen::Ref<const Eigen::MatrixXd>& g, int dmax) {
  if (g.rows() != 16 || g.cols() != 16) throw std::invalid_argument("two-site gate must be 16x16");
  if (dmax < 1) throw std::invalid_argument("dmax must be positive");
}

}  // namespace

double SuperketMps::apply_two_site_gate(int bond, const Eigen::Ref<const Eigen::MatrixXd>& g, int dmax,
                                        double trunc_eps, SplitDirection split, SvdMethod method) {
  check_bond(bond);
  check_two_site_args(g, dmax);
  if (split != SplitDirection::kSymmetric && center_ && *center_ != bond && *center_ != bond + 1) {
    move_center(*center_ < bond ? bond : bond + 1);
  }
  const auto b = static_cast<std::size_t>(bond);
  TwoSiteUpdate up = factor_two_site(tensors_[b], tensors_[b + 1], g, dmax, trunc_eps, split, method);
  tensors_[b] = std::move(up.a);
  tensors_[b + 1] = std::move(up.b);
  lambdas_[b] = std::move(up.lambda);
  discarded_total_ += up.discarded;
  switch (split) {
    case SplitDirection::kRight:
      if (center_) center_ = bond + 1;
      break;
    case SplitDirection::kLeft:
      if (center_) center_ = bond;
      break;
    case SplitDirection::kSymmetric:
      center_.reset();
      break;
  }
  return up.discarded;
}

double SuperketMps::apply_disjoint_two_site_gates(std::span<const BondGate> gates, int dmax, double trunc_eps,
                                                  int max_threads, SvdMethod method) {
  for (std::size_t i = 0; i < gates.size(); ++i) {
    check_bond(gates[i].bond);
    check_two_site_args(*gates[i].gate, dmax);
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(gates[i].bond - gates[j].bond) < 2) {
        throw std::invalid_argument("apply_disjoint_two_site_gates: overlapping bonds");
      }
    }
  }
  std::vector<TwoSiteUpdate> updates(gates.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, max_threads));
  for (std::size_t first = 0; first < gates.size(); first += workers) {
    const std::size_t last = std::min(gates.size(), first + workers);
    std::vector<std::future<TwoSiteUpdate>> pending;
    for (std::size_t i = first + 1; i < last; ++i) {
      const auto bi = static_cast<std::size_t>(gates[i].bond);
      pending.push_back(std::async(std::launch::async, [&, bi, i] {
        return factor_two_site(tensors_[bi], tensors_[bi + 1], *gates[i].gate, dmax, trunc_eps,
                               SplitDirection::kSymmetric, method);
      }));
    }
    const auto b0 = static_cast<std::size_t>(gates[first].bond);
    updates[first] = factor_two_site(tensors_[b0], tensors_[b0 + 1], *gates[first].gate, dmax, trunc_eps,
                                     SplitDirection::kSymmetric, method);
    for (std::size_t i = first + 1; i < last; ++i) updates[i] = pending[i - first - 1].get();
  }
  double total = 0.0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto b = static_cast<std::size_t>(gates[i].bond);
    tensors_[b] = std::move(updates[i].a);
    tensors_[b + 1] = std::move(updates[i].b);
    lambdas_[b] = std::move(updates[i].lambda);
    discarded_total_ += updates[i].discarded;
    total += updates[i].discarded;
  }
  if (!gates.empty()) center_.reset();
  return total;
}

void SuperketMps::shift_right(int site, bool update_lambda) {
  SiteTensor& a = tensors_[static_cast<std::size_t>(site)];
  SiteTensor& b = tensors_[static_cast<std::size_t>(site + 1)];
  linalg::Qr qr = linalg::thin_qr(a.left_matrix());
  b = SiteTensor::from_right_matrix(qr.r * b.right_matrix());
  a = SiteTensor::from_left_matrix(qr.q);
  if (update_lambda) lambdas_[static_cast<std::size_t>(site)] = normalized(linalg::singular_values(qr.r));
}

void SuperketMps::shift_left(int site, bool update_lambda) {
  SiteTensor& a = tensors_[static_cast<std::size_t>(site - 1)];
  SiteTensor& b = tensors_[static_cast<std::size_t>(site)];
  linalg::Qr qr = linalg::thin_qr(b.right_matrix().transpose());
  a = SiteTensor::from_left_matrix(a.left_matrix() * qr.r.transpose());
  b = SiteTensor::from_right_matrix(qr.q.transpose());
  if (update_lambda) {
    lambdas_[static_cast<std::size_t>(site - 1)] = normalized(linalg::singular_values(qr.r));
  }
}

void SuperketMps::move_center(int site) {
  check_site(site);
  if (!center_) throw std::logic_error("move_center: state has no canonical center");
  while (*center_ < site) {
    shift_right(*center_, true);
    ++*center_;
  }
  while (*center_ > site) {
    shift_left(*center_, true);
    --*center_;
  }
}

void SuperketMps::canonicalize(int center, std::optional<std::pair<int, double>> truncation) {
  check_site(center);
  const int n = size();
  for (int i = 0; i + 1 < n; ++i) shift_right(i, false);
  for (int i = n - 1; i > 0; --i) {
    SiteTensor& a = tensors_[static_cast<std::size_t>(i - 1)];
    SiteTensor& b = tensors_[static_cast<std::size_t>(i)];
    const linalg::Svd svd = linalg::thin_svd(b.right_matrix());
    linalg::TruncationResult trunc{svd.s.size(), 0.0};
    if (truncation) trunc = linalg::choose_rank(svd.s, truncation->first, truncation->second);
    const Eigen::Index k = trunc.kept;
    b = SiteTensor::from_right_matrix(svd.vt.topRows(k));
    a = SiteTensor::from_left_matrix(a.left_matrix() * svd.u.leftCols(k) * svd.s.head(k).asDiagonal());
    lambdas_[static_cast<std::size_t>(i - 1)] = normalized(svd.s.head(k));
    discarded_total_ += trunc.discarded_weight;
  }
  center_ = 0;
  move_center(center);
}

SchmidtSpectrum SuperketMps::schmidt_spectrum(int cut) {
  check_bond(cut);
  if (!center_) canonicalize(cut);
  move_center(cut);
  const Eigen::VectorXd s = normalized(linalg::singular_values(tensor(cut).left_matrix()));
  SchmidtSpectrum out;
  out.cut = cut;
  out.values.assign(s.data(), s.data() + s.size());
  return out;
}

double SuperketMps::coefficient(std::span<const PauliFactor> string) const {
  std::vector<int> ops(static_cast<std::size_t>(size()), 0);
  for (const auto& f : string) {
    check_site(f.site);
    ops[static_cast<std::size_t>(f.site)] = f.op.value();
  }
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (int i = 0; i < size(); ++i) v = v * tensor(i).slice(ops[static_cast<std::size_t>(i)]);
  return v(0);
}

double SuperketMps::expect_pauli_string(std::span<const PauliFactor> string) const {
  return coefficient(string) / identity_coefficient();
}

double SuperketMps::renormalize_identity() {
  const double c0 = identity_coefficient();
  if (!std::isfinite(c0) || std::abs(c0) < 1e-300) {
    throw StateCollapseError("identity coefficient underflow (" + std::to_string(c0) + ")");
  }
  const int target = center_.value_or(0);
  tensors_[static_cast<std::size_t>(target)].data() /= c0;
  return c0;
}

double SuperketMps::norm() const {
  // <rho|rho> by transfer matrices over the left bond pair.
  Eigen::MatrixXd env = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < size(); ++i) {
    const SiteTensor& t = tensor(i);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(t.right(), t.right());
    for (int s = 0; s < 4; ++s) {
      const Eigen::MatrixXd sl = t.slice(s);
      next.noalias() += sl.transpose() * env * sl;
    }
    env = std::move(next);
  }
  return std::sqrt(std::max(0.0, env(0, 0)));
}

Eigen::VectorXd SuperketMps::to_dense() const {
  if (size() > 8) throw std::invalid_argument("to_dense: chain too long");
  // rows: strings of the sites processed so far (site 0 least significant)
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < size(); ++i) {
    const SiteTensor& t = tensor(i);
    Eigen::MatrixXd next(acc.rows() * 4, t.right());
    for (int s = 0; s < 4; ++s) {
      for (Eigen::Index r = 0; r < acc.rows(); ++r) {
        next.row(r + acc.rows() * s) = acc.row(r) * t.slice(s);
      }
    }
    acc = std::move(next);
  }
  return acc.col(0);
}

IdentityEnvironments::IdentityEnvironments(const SuperketMps& state) : state_(&state) {
  const int n = state.size();
  left_.resize(static_cast<std::size_t>(n + 1));
  right_.resize(static_cast<std::size_t>(n + 1));
  left_[0] = Eigen::RowVectorXd::Ones(1);
  for (int i = 0; i < n; ++i) left_[static_cast<std::size_t>(i + 1)] = left_[static_cast<std::size_t>(i)] * state.tensor(i).slice(0);
  right_[static_cast<std::size_t>(n)] = Eigen::VectorXd::Ones(1);
  for (int i = n - 1; i >= 0; --i) right_[static_cast<std::size_t>(i)] = state.tensor(i).slice(0) * right_[static_cast<std::size_t>(i + 1)];
  identity_ = left_[static_cast<std::size_t>(n)](0);
  if (!std::isfinite(identity_) || std::abs(identity_) < 1e-300) {
    throw StateCollapseError("identity coefficient underflow in environments");
  }
}

double IdentityEnvironments::expect(int first_site, std::span<const PauliIndex> ops) const {
  const int last = first_site + static_cast<int>(ops.size());
  if (first_site < 0 || last > state_->size()) throw std::out_of_range("IdentityEnvironments::expect");
  Eigen::RowVectorXd v = left_[static_cast<std::size_t>(first_site)];
  for (std::size_t k = 0; k < ops.size(); ++k) {
    v = v * state_->tensor(first_site + static_cast<int>(k)).slice(ops[k].value());
  }
  return v.dot(right_[static_cast<std::size_t>(last)]) / identity_;
}

}  // namespace nessmpo
