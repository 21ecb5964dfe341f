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

#include <string_view>
#include <vector>

#include "nessmpo/pauli.hpp"

namespace nessmpo {

enum class ModelKind { kXxz, kTiltedIsing };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct ModelSpec {
  ModelKind kind = ModelKind::kXxz;
  int n = 2;
  double delta = 1.0;          // XXZ anisotropy
  std::vector<double> fields;  // XXZ site fields h_l (length n); empty means zero
  double hx = 3.375;           // tilted Ising
  double hz = 2.0;

  static ModelSpec xxz(int n, double delta, std::vector<double> fields = {});
  static ModelSpec tilted_ising(int n, double hx = 3.375, double hz = 2.0);

  /// Throws std::invalid_argument on n < 2, non-finite values or a field
  /// vector of the wrong length.
  void validate() const;
  double field(int site) const;
};

/// Staggered field pattern (h_odd, h_even, h_odd, ...) on 1-based sites, e.g.
/// (0, -0.5) gives h = (0, -0.5, 0, -0.5, ...).
std::vector<double> staggered_fields(int n, double h_odd, double h_even);

/// XXZ bond terms sx sx + sy sy + delta sz sz plus site fields. Each site
/// field is split evenly over the bonds touching that site, so the edge
/// sites put their whole field on their single bond and the terms sum to
/// the chain Hamiltonian exactly.
std::vector<LocalOperator> build_xxz_bond_terms(const ModelSpec& spec);

/// Tilted Ising bond terms -2 sz sz + (hx sx + hz sz)/2 on each of the two
/// sites. Edge sites therefore carry half of the bulk field.
std::vector<LocalOperator> build_tilted_ising_bond_terms(const ModelSpec& spec);

/// Dispatches on spec.kind.
std::vector<LocalOperator> build_bond_terms(const ModelSpec& spec);

}  // namespace nessmpo
