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

#include "nessmpo/pauli.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace nessmpo {

namespace {

constexpr Complex kI{0.0, 1.0};

// Levi-Civita based product table for the three non-trivial Paulis.
PauliProduct multiply_nontrivial(int a, int b) {
  if (a == b) return {1.0, PauliIndex::identity()};
  const int c = 6 - a - b;  // the remaining index among {1,2,3}
  const bool cyclic = (a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1);
  return {cyclic ? kI : -kI, PauliIndex(c)};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// M_ab = tr(sigma^a phi(sigma^b)) / dim for a linear map phi.
template <typename Map>
RMatrix pauli_matrix_of_map(int nsites, Map&& phi) {
  const auto& basis = pauli_basis(nsites);
  const auto n = static_cast<Eigen::Index>(basis.size());
  const double dim = static_cast<double>(basis.front().rows());
  RMatrix m(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const CMatrix image = phi(basis[b]);
    for (Eigen::Index a = 0; a < n; ++a) {
      // Pauli strings are Hermitian, so tr(sigma^a X) = sum(conj(sigma^a) .* X).
      const Complex v = (basis[a].conjugate().array() * image.array()).sum() / dim;
      m(a, b) = v.real();
    }
  }
  return m;
}

}  // namespace

PauliIndex::PauliIndex(int value) : value_(static_cast<std::uint8_t>(value)) {
  if (value < 0 || value > 3) {
    throw std::invalid_argument("PauliIndex out of range: " + std::to_string(value));
  }
}

PauliProduct pauli_multiply(PauliIndex a, PauliIndex b) {
  if (a.value() == 0) return {1.0, b};
  if (b.value() == 0) return {1.0, a};
  return multiply_nontrivial(a.value(), b.value());
}

const Eigen::Matrix2cd& pauli_matrix(PauliIndex p) {
  static const std::array<Eigen::Matrix2cd, 4> table = [] {
    std::array<Eigen::Matrix2cd, 4> t;
    t[0] << 1, 0, 0, 1;
    t[1] << 0, 1, 1, 0;
    t[2] << 0, -kI, kI, 0;
    t[3] << 1, 0, 0, -1;
    return t;
  }();
  return table[p.value()];
}

const std::vector<CMatrix>& pauli_basis(int nsites) {
  static const std::vector<CMatrix> one = [] {
    std::vector<CMatrix> b;
    for (int a = 0; a < 4; ++a) b.emplace_back(pauli_matrix(PauliIndex(a)));
    return b;
  }();
  static const std::vector<CMatrix> two = [] {
    std::vector<CMatrix> b;
    for (int a2 = 0; a2 < 4; ++a2)
      for (int a1 = 0; a1 < 4; ++a1)
        b.push_back(kron(pauli_matrix(PauliIndex(a2)), pauli_matrix(PauliIndex(a1))));
    return b;
  }();
  if (nsites == 1) return one;
  if (nsites == 2) return two;
  throw std::invalid_argument("pauli_basis supports 1 or 2 sites");
}

LocalOperator::LocalOperator(CMatrix entries) : entries_(std::move(entries)) {
  const auto r = entries_.rows();
  if (r != entries_.cols() || (r != 2 && r != 4)) {
    throw std::invalid_argument("LocalOperator must be 2x2 or 4x4, got " + std::to_string(r) +
                                "x" + std::to_string(entries_.cols()));
  }
}

LocalOperator LocalOperator::product(const LocalOperator& first, const LocalOperator& second) {
  if (first.dim() != 2 || second.dim() != 2) {
    throw std::invalid_argument("LocalOperator::product expects single-site factors");
  }
  return LocalOperator(kron(second.matrix(), first.matrix()));
}

LocalOperator LocalOperator::identity(int nsites) {
  if (nsites != 1 && nsites != 2) throw std::invalid_argument("identity: nsites must be 1 or 2");
  const int d = nsites == 1 ? 2 : 4;
  return LocalOperator(CMatrix::Identity(d, d));
}

LocalOperator LocalOperator::pauli(PauliIndex p) { return LocalOperator(pauli_matrix(p)); }

bool LocalOperator::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

LocalOperator LocalOperator::operator+(const LocalOperator& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("LocalOperator dimension mismatch");
  return LocalOperator(entries_ + o.entries_);
}

LocalOperator LocalOperator::operator-(const LocalOperator& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("LocalOperator dimension mismatch");
  return LocalOperator(entries_ - o.entries_);
}

LocalOperator LocalOperator::operator*(const LocalOperator& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("LocalOperator dimension mismatch");
  return LocalOperator(entries_ * o.entries_);
}

LocalOperator operator*(Complex s, const LocalOperator& o) { return LocalOperator(s * o.entries_); }

LocalSuperop::LocalSuperop(RMatrix entries) : entries_(std::move(entries)) {
  const auto r = entries_.rows();
  if (r != entries_.cols() || (r != 4 && r != 16)) {
    throw std::invalid_argument("LocalSuperop must be 4x4 or 16x16");
  }
}

LocalSuperop LocalSuperop::operator+(const LocalSuperop& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("LocalSuperop dimension mismatch");
  return LocalSuperop(entries_ + o.entries_);
}

LocalSuperop LocalSuperop::operator*(double s) const { return LocalSuperop(entries_ * s); }

CVector operator_to_coeffs(const LocalOperator& op) {
  const auto& basis = pauli_basis(op.nsites());
  CVector c(static_cast<Eigen::Index>(basis.size()));
  const double dim = op.dim();
  for (std::size_t s = 0; s < basis.size(); ++s) {
    c(static_cast<Eigen::Index>(s)) = (basis[s].adjoint() * op.matrix()).trace() / dim;
  }
  return c;
}

LocalOperator coeffs_to_operator(const CVector& coeffs) {
  if (coeffs.size() != 4 && coeffs.size() != 16) {
    throw std::invalid_argument("coeffs_to_operator expects 4 or 16 coefficients");
  }
  const int nsites = coeffs.size() == 4 ? 1 : 2;
  const auto& basis = pauli_basis(nsites);
  CMatrix m = CMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (Eigen::Index s = 0; s < coeffs.size(); ++s) m += coeffs(s) * basis[s];
  return LocalOperator(std::move(m));
}

LocalSuperop hamiltonian_superop(const LocalOperator& h) {
  const double scale = std::max(1.0, h.matrix().cwiseAbs().maxCoeff());
  if (!h.is_hermitian(1e-12 * scale)) {
    throw std::invalid_argument("hamiltonian_superop: operator is not Hermitian");
  }
  const CMatrix& hm = h.matrix();
  return LocalSuperop(pauli_matrix_of_map(h.nsites(), [&](const CMatrix& rho) -> CMatrix {
    return -kI * (hm * rho - rho * hm);
  }));
}

LocalSuperop dissipator_superop(std::span<const LocalOperator> ls, double gamma) {
  if (ls.empty()) throw std::invalid_argument("dissipator_superop: no Lindblad operators");
  const int dim = ls.front().dim();
  for (const auto& l : ls) {
    if (l.dim() != dim) throw std::invalid_argument("dissipator_superop: dimension mismatch");
  }
  return LocalSuperop(pauli_matrix_of_map(ls.front().nsites(), [&](const CMatrix& rho) -> CMatrix {
    CMatrix out = CMatrix::Zero(dim, dim);
    for (const auto& l : ls) {
      const CMatrix& lm = l.matrix();
      const CMatrix ld = lm.adjoint();
      const CMatrix ldl = ld * lm;
      out += 2.0 * lm * rho * ld - ldl * rho - rho * ldl;
    }
    return gamma * out;
  }));
}

LocalSuperop superop_exponential(const LocalSuperop& m, double tau) {
  if (!std::isfinite(tau) || !m.matrix().allFinite()) {
    throw std::invalid_argument("superop_exponential: non-finite input");
  }
  RMatrix e = (m.matrix() * tau).exp();
  if (!e.allFinite()) throw std::runtime_error("superop_exponential: overflow");
  if (m.matrix().row(0).isZero(0.0)) {
    e.row(0).setZero();
    e(0, 0) = 1.0;
  }
  return LocalSuperop(std::move(e));
}

}  // namespace nessmpo
