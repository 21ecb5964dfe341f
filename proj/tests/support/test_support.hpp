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

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nessmpo/pauli.hpp"
#include "nessmpo/superket.hpp"

namespace nessmpo::testing {

using Rng = std::mt19937_64;

/// Random superket with bond dimensions up to max_dim. The identity slice is
/// biased toward the unit matrix so the trace stays well away from zero.
SuperketMps random_superket(int n, int max_dim, Rng& rng);

/// Multiply every bond by a random invertible matrix and its inverse. The
/// represented coefficients are unchanged, the tensors are not.
void random_gauge(SuperketMps& state, Rng& rng);

/// Random full-rank density matrix of the given dimension.
CMatrix random_density(int dim, Rng& rng);

/// Random Hermitian matrix with entries of order one.
CMatrix random_hermitian(int dim, Rng& rng);

/// Random real matrix with standard normal entries.
RMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Pauli string with `weight` non-identity factors on distinct sites.
std::vector<PauliFactor> random_string(int n, int weight, Rng& rng);

/// Dense index of a Pauli string (site 0 least significant).
Eigen::Index dense_index(const std::vector<PauliFactor>& string);

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace nessmpo::testing
