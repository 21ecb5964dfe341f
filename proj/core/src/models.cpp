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

#include "nessmpo/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nessmpo {

namespace {

const LocalOperator& op_x() {
  static const LocalOperator x = LocalOperator::pauli(PauliIndex::x());
  return x;
}
const LocalOperator& op_y() {
  static const LocalOperator y = LocalOperator::pauli(PauliIndex::y());
  return y;
}
const LocalOperator& op_z() {
  static const LocalOperator z = LocalOperator::pauli(PauliIndex::z());
  return z;
}
const LocalOperator& op_id() {
  static const LocalOperator id = LocalOperator::identity(1);
  return id;
}

LocalOperator pair(const LocalOperator& a, const LocalOperator& b) { return LocalOperator::product(a, b); }

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kXxz: return "xxz";
    case ModelKind::kTiltedIsing: return "tilted_ising";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "xxz") return ModelKind::kXxz;
  if (text == "tilted_ising") return ModelKind::kTiltedIsing;
  throw std::invalid_argument("unknown model kind '" + std::string(text) + "'");
}

ModelSpec ModelSpec::xxz(int n, double delta, std::vector<double> fields) {
  ModelSpec s;
  s.kind = ModelKind::kXxz;
  s.n = n;
  s.delta = delta;
  s.fields = std::move(fields);
  s.validate();
  return s;
}

ModelSpec ModelSpec::tilted_ising(int n, double hx, double hz) {
  ModelSpec s;
  s.kind = ModelKind::kTiltedIsing;
  s.n = n;
  s.hx = hx;
  s.hz = hz;
  s.validate();
  return s;
}

void ModelSpec::validate() const {
  if (n < 2) throw std::invalid_argument("model: n must be >= 2");
  if (!std::isfinite(delta) || !std::isfinite(hx) || !std::isfinite(hz)) {
    throw std::invalid_argument("model: non-finite parameter");
  }
  if (!fields.empty() && static_cast<int>(fields.size()) != n) {
    throw std::invalid_argument("model: field vector has length " + std::to_string(fields.size()) +
                                ", expected " + std::to_string(n));
  }
  for (double h : fields) {
    if (!std::isfinite(h)) throw std::invalid_argument("model: non-finite field");
  }
}

double ModelSpec::field(int site) const {
  return fields.empty() ? 0.0 : fields.at(static_cast<std::size_t>(site));
}

std::vector<double> staggered_fields(int n, double h_odd, double h_even) {
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i)] = (i % 2 == 0) ? h_odd : h_even;
  return h;
}

std::vector<LocalOperator> build_xxz_bond_terms(const ModelSpec& spec) {
  if (spec.kind != ModelKind::kXxz) throw std::invalid_argument("build_xxz_bond_terms: model is not xxz");
  spec.validate();
  const int n = spec.n;
  auto weight = [n](int site) { return (site == 0 || site == n - 1) ? 1.0 : 0.5; };
  const LocalOperator coupling =
      pair(op_x(), op_x()) + pair(op_y(), op_y()) + Complex(spec.delta) * pair(op_z(), op_z());
  std::vector<LocalOperator> terms;
  terms.reserve(static_cast<std::size_t>(n - 1));
  for (int l = 0; l + 1 < n; ++l) {
    const double h1 = weight(l) * spec.field(l);
    const double h2 = weight(l + 1) * spec.field(l + 1);
    terms.push_back(coupling + Complex(h1) * pair(op_z(), op_id()) + Complex(h2) * pair(op_id(), op_z()));
  }
  return terms;
}

std::vector<LocalOperator> build_tilted_ising_bond_terms(const ModelSpec& spec) {
  if (spec.kind != ModelKind::kTiltedIsing) {
    throw std::invalid_argument("build_tilted_ising_bond_terms: model is not tilted_ising");
  }
  spec.validate();
  const LocalOperator site_field = Complex(0.5 * spec.hx) * op_x() + Complex(0.5 * spec.hz) * op_z();
  const LocalOperator term = Complex(-2.0) * pair(op_z(), op_z()) + pair(site_field, op_id()) +
                             pair(op_id(), site_field);
  return std::vector<LocalOperator>(static_cast<std::size_t>(spec.n - 1), term);
}

std::vector<LocalOperator> build_bond_terms(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::kXxz: return build_xxz_bond_terms(spec);
    case ModelKind::kTiltedIsing: return build_tilted_ising_bond_terms(spec);
  }
  throw std::invalid_argument("build_bond_terms: unknown model kind");
}

}  // namespace nessmpo
