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

#include "nessmpo/baths.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace nessmpo {

namespace {

constexpr Complex kI{0.0, 1.0};

// r^i for the diagonal two-spin construction.
std::array<Eigen::Matrix2cd, 4> raising_projectors() {
  const Eigen::Matrix2cd& x = pauli_matrix(PauliIndex::x());
  const Eigen::Matrix2cd& y = pauli_matrix(PauliIndex::y());
  const Eigen::Matrix2cd& z = pauli_matrix(PauliIndex::z());
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  return {x + kI * y, x - kI * y, id + z, id - z};
}

struct Eigenbasis {
  Eigen::Vector4d d;
  CMatrix v;  // rho = v^dag diag(d) v
};

Eigenbasis diagonalize(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  if (es.info() != Eigen::Success) throw std::runtime_error("two-spin bath: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors().adjoint()};
}

}  // namespace

std::string_view to_string(BathKind kind) {
  switch (kind) {
    case BathKind::kSingleSpin: return "single_spin";
    case BathKind::kTwoSpin: return "two_spin";
  }
  return "unknown";
}

BathKind parse_bath_kind(std::string_view text) {
  if (text == "single_spin") return BathKind::kSingleSpin;
  if (text == "two_spin") return BathKind::kTwoSpin;
  throw std::invalid_argument("unknown bath kind '" + std::string(text) + "'");
}

BathSpec BathSpec::single_spin(double mu_left, double mu_right, double gamma) {
  BathSpec b;
  b.kind = BathKind::kSingleSpin;
  b.mu_left = mu_left;
  b.mu_right = mu_right;
  b.gamma = gamma;
  b.validate();
  return b;
}

BathSpec BathSpec::two_spin(double t_left, double t_right, double gamma) {
  BathSpec b;
  b.kind = BathKind::kTwoSpin;
  b.t_left = t_left;
  b.t_right = t_right;
  b.gamma = gamma;
  b.validate();
  return b;
}

void BathSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("bath: gamma must be > 0");
  if (!std::isfinite(mu_left) || !std::isfinite(mu_right)) {
    throw std::invalid_argument("bath: non-finite potential");
  }
  if (kind == BathKind::kTwoSpin) {
    if (!target_left && !(t_left > 0.0)) throw std::invalid_argument("bath: T_left must be > 0");
    if (!target_right && !(t_right > 0.0)) throw std::invalid_argument("bath: T_right must be > 0");
    if (target_left) validate_two_site_density(*target_left);
    if (target_right) validate_two_site_density(*target_right);
  }
}

SingleSpinRates single_spin_rates(double mu) {
  const double t = std::tanh(mu);
  return {std::sqrt((1.0 - t) / (1.0 + t)), std::sqrt((1.0 + t) / (1.0 - t))};
}

std::vector<LocalOperator> single_spin_lindblad_operators(double mu) {
  const auto rates = single_spin_rates(mu);
  const Eigen::Matrix2cd& x = pauli_matrix(PauliIndex::x());
  const Eigen::Matrix2cd& y = pauli_matrix(PauliIndex::y());
  return {LocalOperator(0.5 * std::sqrt(rates.gamma_plus) * (x + kI * y)),
          LocalOperator(0.5 * std::sqrt(rates.gamma_minus) * (x - kI * y))};
}

LocalSuperop single_spin_bath_generator(double mu, double gamma) {
  const auto ops = single_spin_lindblad_operators(mu);
  return dissipator_superop(ops, gamma);
}

LocalSuperop single_spin_bath_propagator(double mu, double gamma, double tau) {
  const auto r = single_spin_rates(mu);
  const double sum = r.gamma_plus + r.gamma_minus;
  const double s = gamma * tau;
  RMatrix m = RMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = std::exp(-sum * s);
  m(2, 2) = std::exp(-sum * s);
  m(3, 3) = std::exp(-2.0 * sum * s);
  m(3, 0) = (r.gamma_plus - r.gamma_minus) / sum * (1.0 - std::exp(-2.0 * sum * s));
  return LocalSuperop(std::move(m));
}

Eigen::Vector4d single_spin_fixed_point(double mu) { return {1.0, 0.0, 0.0, -std::tanh(mu)}; }

RMatrix pauli_rotation(const CMatrix& v) {
  if (v.rows() != 4 || v.cols() != 4) throw std::invalid_argument("pauli_rotation: V must be 4x4");
  const auto& basis = pauli_basis(2);
  RMatrix r(16, 16);
  for (int a = 0; a < 16; ++a) {
    const CMatrix rotated = v.adjoint() * basis[static_cast<std::size_t>(a)] * v;
    for (int b = 0; b < 16; ++b) {
      r(a, b) = (rotated * basis[static_cast<std::size_t>(b)]).trace().real() / 4.0;
    }
  }
  return r;
}

double validate_two_site_density(const CMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("two-spin target must be 4x4");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("two-spin target is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-10) {
    throw std::invalid_argument("two-spin target does not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  const double lowest = es.eigenvalues().minCoeff();
  if (lowest < -1e-10) throw std::invalid_argument("two-spin target is not positive semidefinite");
  return lowest;
}

LocalSuperop two_spin_bath_generator(const CMatrix& rho_b, double gamma) {
  validate_two_site_density(rho_b);
  const Eigenbasis eb = diagonalize(rho_b);
  const Eigen::Vector4d& d = eb.d;
  RMatrix diag = -RMatrix::Identity(16, 16);
  diag(0, 0) = 0.0;
  diag(15, 0) = d(0) - d(1) - d(2) + d(3);
  diag(12, 0) = d(0) + d(1) - d(2) - d(3);
  diag(3, 0) = d(0) - d(1) + d(2) - d(3);
  const RMatrix r = pauli_rotation(eb.v);
  return LocalSuperop(gamma * (r.transpose() * diag * r));
}

std::vector<LocalOperator> two_spin_lindblad_operators(const CMatrix& rho_b) {
  validate_two_site_density(rho_b);
  const Eigenbasis eb = diagonalize(rho_b);
  const auto r = raising_projectors();
  std::vector<LocalOperator> ops;
  ops.reserve(16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const int m = (i % 2) + 2 * (j % 2);
      const double amp = std::sqrt(std::max(0.0, eb.d(m)) / 32.0);
      const LocalOperator l = LocalOperator::product(LocalOperator(r[static_cast<std::size_t>(i)]),
                                                     LocalOperator(r[static_cast<std::size_t>(j)]));
      ops.emplace_back(amp * (eb.v.adjoint() * l.matrix() * eb.v));
    }
  }
  return ops;
}

CMatrix thermal_two_site_state(const LocalOperator& h, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("thermal state: temperature must be > 0");
  if (h.dim() != 4) throw std::invalid_argument("thermal state: expects a two-site operator");
  if (!h.is_hermitian(1e-12 * std::max(1.0, h.matrix().cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("thermal state: operator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  const Eigen::VectorXd e = es.eigenvalues();
  const Eigen::VectorXd w = (-(e.array() - e.minCoeff()) / temperature).exp();
  CMatrix rho = es.eigenvectors() * (w / w.sum()).cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (rho + rho.adjoint());
}

CMatrix two_spin_target(const BathSpec& bath, const ModelSpec& model, ChainEnd end) {
  const auto& override_target = end == ChainEnd::kLeft ? bath.target_left : bath.target_right;
  if (override_target) return *override_target;
  const auto terms = build_bond_terms(model);
  const LocalOperator& h = end == ChainEnd::kLeft ? terms.front() : terms.back();
  return thermal_two_site_state(h, end == ChainEnd::kLeft ? bath.t_left : bath.t_right);
}

}  // namespace nessmpo
