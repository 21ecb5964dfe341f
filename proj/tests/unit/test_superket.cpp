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

#include <cmath>

#include <gtest/gtest.h>

#include "nessmpo/baths.hpp"
#include "nessmpo/superket.hpp"
#include "test_support.hpp"

namespace nessmpo {
namespace {

using testing::random_matrix;
using testing::random_superket;
using testing::Rng;

Eigen::Index pow4(int k) { return Eigen::Index{1} << (2 * k); }

// Dense reference: act with a 4x4 or 16x16 map on the Pauli digits of
// site `first` (and first + 1).
RVector apply_dense(const RVector& c, int n, int first, const RMatrix& g) {
  const int width = g.rows() == 4 ? 1 : 2;
  const Eigen::Index block = pow4(width);
  const Eigen::Index low = pow4(first);
  const Eigen::Index high = pow4(n - first - width);
  RVector out = RVector::Zero(c.size());
  for (Eigen::Index h = 0; h < high; ++h) {
    for (Eigen::Index l = 0; l < low; ++l) {
      RVector local(block);
      for (Eigen::Index a = 0; a < block; ++a) local(a) = c(l + low * (a + block * h));
      const RVector image = g * local;
      for (Eigen::Index a = 0; a < block; ++a) out(l + low * (a + block * h)) = image(a);
    }
  }
  return out;
}

std::vector<Eigen::Vector4d> z_product(const std::vector<double>& mus) {
  std::vector<Eigen::Vector4d> v;
  for (double mu : mus) v.emplace_back(1.0, 0.0, 0.0, -std::tanh(mu));
  return v;
}

void expect_canonical(const SuperketMps& s, int center, double tol) {
  for (int i = 0; i < center; ++i) {
    const auto m = s.tensor(i).left_matrix();
    EXPECT_LT((m.transpose() * m - RMatrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff(), tol) << i;
  }
  for (int i = center + 1; i < s.size(); ++i) {
    const auto m = s.tensor(i).right_matrix();
    EXPECT_LT((m * m.transpose() - RMatrix::Identity(m.rows(), m.rows())).cwiseAbs().maxCoeff(), tol) << i;
  }
}

void expect_lambdas_normalized(const SuperketMps& s) {
  for (int b = 0; b + 1 < s.size(); ++b) {
    const auto& l = s.bond_lambdas(b);
    EXPECT_NEAR(l.squaredNorm(), 1.0, 1e-12) << b;
    for (Eigen::Index k = 1; k < l.size(); ++k) EXPECT_GE(l(k - 1), l(k));
    EXPECT_GE(l.minCoeff(), 0.0);
  }
}

TEST(ProductState, MaximallyMixed) {
  const auto s = SuperketMps::product_state(z_product({0.0, 0.0, 0.0}));
  EXPECT_EQ(s.max_bond_dim(), 1);
  for (int l = 0; l < 3; ++l) {
    for (int a = 1; a < 4; ++a) {
      const PauliFactor f{l, PauliIndex(a)};
      EXPECT_EQ(s.expect_pauli_string({&f, 1}), 0.0);
    }
  }
  EXPECT_DOUBLE_EQ(s.identity_coefficient(), 1.0);
}

TEST(ProductState, LinearPotentialProfile) {
  const int n = 9;
  std::vector<double> mus;
  for (int l = 0; l < n; ++l) mus.push_back(0.22 - 0.44 * l / (n - 1));
  const auto s = SuperketMps::product_state(z_product(mus));
  for (int l = 0; l < n; ++l) {
    const PauliFactor f{l, PauliIndex::z()};
    EXPECT_NEAR(s.expect_pauli_string({&f, 1}), -std::tanh(mus[static_cast<std::size_t>(l)]), 1e-15);
    const PauliFactor x{l, PauliIndex::x()};
    EXPECT_EQ(s.expect_pauli_string({&x, 1}), 0.0);
  }
}

TEST(ProductState, PureSpinDownAndValidation) {
  const std::vector<Eigen::Vector4d> down = {Eigen::Vector4d(1.0, 0.0, 0.0, -1.0)};
  const auto s = SuperketMps::product_state(down);
  const PauliFactor f{0, PauliIndex::z()};
  EXPECT_DOUBLE_EQ(s.expect_pauli_string({&f, 1}), -1.0);
  const std::vector<Eigen::Vector4d> bad = {Eigen::Vector4d(0.0, 0.0, 0.0, 1.0)};
  EXPECT_THROW(SuperketMps::product_state(bad), std::invalid_argument);
  EXPECT_TRUE(s.expect_pauli_string({}) == 1.0);
}

TEST(OneSiteGate, IdentityLeavesTensorsEqual) {
  Rng rng(21);
  SuperketMps s = random_superket(4, 5, rng);
  const SuperketMps before = s;
  s.apply_one_site_gate(2, RMatrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) EXPECT_EQ((s.tensor(i).data() - before.tensor(i).data()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(s.apply_one_site_gate(4, RMatrix::Identity(4, 4)), std::out_of_range);
}

TEST(OneSiteGate, BathPropagatorOnProductSite) {
  const double mu = 0.3, gamma = 1.0, tau = 0.05, m = 0.4;
  const std::vector<Eigen::Vector4d> v = {Eigen::Vector4d(1.0, 0.2, -0.1, m), Eigen::Vector4d(1.0, 0.0, 0.0, 0.0)};
  SuperketMps s = SuperketMps::product_state(v);
  s.apply_one_site_gate(0, single_spin_bath_propagator(mu, gamma, tau).matrix());
  const auto [gp, gm] = single_spin_rates(mu);
  const double r = gp + gm;
  const double expect_z = m * std::exp(-2 * r * tau) + (gp - gm) / r * (1 - std::exp(-2 * r * tau));
  const PauliFactor x{0, PauliIndex::x()}, y{0, PauliIndex::y()}, z{0, PauliIndex::z()};
  EXPECT_NEAR(s.expect_pauli_string({&x, 1}), 0.2 * std::exp(-r * tau), 1e-14);
  EXPECT_NEAR(s.expect_pauli_string({&y, 1}), -0.1 * std::exp(-r * tau), 1e-14);
  EXPECT_NEAR(s.expect_pauli_string({&z, 1}), expect_z, 1e-14);
  EXPECT_EQ(s.max_bond_dim(), 1);

  for (int k = 0; k < 2000; ++k) s.apply_one_site_gate(0, single_spin_bath_propagator(mu, gamma, tau).matrix());
  EXPECT_NEAR(s.expect_pauli_string({&z, 1}), -std::tanh(mu), 1e-12);
}

TEST(TwoSiteGate, IdentityOnProductStateDiscardsNothing) {
  const auto v = z_product({0.1, -0.2, 0.3, 0.0});
  SuperketMps s = SuperketMps::product_state(v);
  const RVector before = s.to_dense();
  const double w = s.apply_two_site_gate(1, RMatrix::Identity(16, 16), 8, 1e-10);
  EXPECT_LT(w, 1e-25);
  EXPECT_LT((s.to_dense() - before).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(s.bond_dim(1), 1);
}

TEST(TwoSiteGate, ExactRankOnPreviouslyProductBond) {
  Rng rng(22);
  SuperketMps s = SuperketMps::product_state(z_product({0.1, 0.2, 0.3, 0.4, 0.5}));
  const RMatrix g = random_matrix(16, 16, rng);
  const double w = s.apply_two_site_gate(2, g, 16, 0.0);
  EXPECT_EQ(w, 0.0);
  EXPECT_LE(s.bond_dim(2), 16);
  EXPECT_THROW(s.apply_two_site_gate(4, g, 16, 0.0), std::out_of_range);
  EXPECT_THROW(s.apply_two_site_gate(1, RMatrix::Identity(4, 4), 16, 0.0), std::invalid_argument);
}

TEST(TwoSiteGate, MatchesDenseOracleForAllSplitsAndMethods) {
  Rng rng(23);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 3 + trial % 4;
    SuperketMps s = random_superket(n, 6, rng);
    if (trial % 3 == 0) s.canonicalize(0);
    RVector dense = s.to_dense();
    for (int k = 0; k < 4; ++k) {
      const int bond = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
      const RMatrix g = RMatrix::Identity(16, 16) + 0.3 * random_matrix(16, 16, rng);
      const auto split = static_cast<SplitDirection>(k % 3);
      const auto method = k % 2 ? SvdMethod::kRandomized : SvdMethod::kExact;
      EXPECT_LT(s.apply_two_site_gate(bond, g, 1 << 12, 0.0, split, method), 1e-12);
      dense = apply_dense(dense, n, bond, g);
    }
    const RVector got = s.to_dense();
    EXPECT_LT((got - dense).cwiseAbs().maxCoeff(), 1e-10 * dense.cwiseAbs().maxCoeff()) << trial;
  }
}

TEST(TwoSiteGate, DiscardedWeightMatchesNormLossProperty) {
  Rng rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + trial % 3;
    SuperketMps s = random_superket(n, 10, rng);
    s.canonicalize(static_cast<int>(rng() % static_cast<unsigned>(n)));
    const int bond = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
    const RMatrix g = RMatrix::Identity(16, 16) + 0.5 * random_matrix(16, 16, rng);
    SuperketMps full = s;
    full.apply_two_site_gate(bond, g, 1 << 12, 0.0);
    const auto method = trial % 2 ? SvdMethod::kRandomized : SvdMethod::kExact;
    const double w = s.apply_two_site_gate(bond, g, 1 + trial % 6, 1e-4, SplitDirection::kRight, method);
    const double direct = 1.0 - std::pow(s.norm() / full.norm(), 2);
    EXPECT_NEAR(w, direct, 1e-12) << trial;
    EXPECT_GE(w, 0.0);
    expect_lambdas_normalized(s);
  }
}

TEST(TwoSiteGate, SweepKeepsCanonicalForm) {
  Rng rng(25);
  SuperketMps s = random_superket(6, 6, rng);
  s.canonicalize(0);
  for (int b = 0; b < 5; ++b) {
    s.apply_two_site_gate(b, RMatrix::Identity(16, 16) + 0.2 * random_matrix(16, 16, rng), 64, 1e-14);
  }
  ASSERT_TRUE(s.canonical_center().has_value());
  expect_canonical(s, *s.canonical_center(), 1e-10);
  expect_lambdas_normalized(s);
}

TEST(TwoSiteGate, DisjointBatchEqualsSequential) {
  Rng rng(26);
  SuperketMps a = random_superket(7, 5, rng);
  SuperketMps b = a;
  std::vector<RMatrix> gates;
  for (int k = 0; k < 3; ++k) gates.push_back(RMatrix::Identity(16, 16) + 0.3 * random_matrix(16, 16, rng));
  const std::vector<SuperketMps::BondGate> batch = {{0, &gates[0]}, {2, &gates[1]}, {4, &gates[2]}};
  EXPECT_EQ(a.apply_disjoint_two_site_gates(batch, 1 << 12, 0.0, 3), 0.0);
  for (const auto& bg : batch) b.apply_two_site_gate(bg.bond, *bg.gate, 1 << 12, 0.0);
  EXPECT_LT((a.to_dense() - b.to_dense()).cwiseAbs().maxCoeff(), 1e-10 * b.to_dense().cwiseAbs().maxCoeff());
  const std::vector<SuperketMps::BondGate> overlapping = {{0, &gates[0]}, {1, &gates[1]}};
  EXPECT_THROW(a.apply_disjoint_two_site_gates(overlapping, 16, 0.0, 2), std::invalid_argument);
}

TEST(Canonicalize, OrthogonalityAndUnchangedCoefficients) {
  Rng rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    SuperketMps s = random_superket(5, 8, rng);
    const RVector before = s.to_dense();
    const int center = trial % 5;
    s.canonicalize(center);
    expect_canonical(s, center, 1e-10);
    expect_lambdas_normalized(s);
    EXPECT_LT((s.to_dense() - before).cwiseAbs().maxCoeff(), 1e-12 * before.cwiseAbs().maxCoeff());
    s.move_center((center + 3) % 5);
    expect_canonical(s, (center + 3) % 5, 1e-10);
  }
}

TEST(Canonicalize, GaugeInvarianceOfExpectationsProperty) {
  Rng rng(28);
  for (int trial = 0; trial < 20; ++trial) {
    SuperketMps s = random_superket(6, 8, rng);
    std::vector<std::vector<PauliFactor>> strings;
    std::vector<double> before;
    for (int k = 0; k < 25; ++k) {
      strings.push_back(testing::random_string(6, 1 + k % 6, rng));
      before.push_back(s.expect_pauli_string(strings.back()));
    }
    testing::random_gauge(s, rng);
    s.canonicalize(static_cast<int>(rng() % 6));
    for (std::size_t k = 0; k < strings.size(); ++k) {
      EXPECT_NEAR(s.expect_pauli_string(strings[k]), before[k], 1e-10);
    }
  }
}

TEST(Canonicalize, ProductStateIsAlreadyCanonical) {
  SuperketMps s = SuperketMps::product_state(z_product({0.1, 0.2, 0.3}));
  for (int c = 0; c < 3; ++c) {
    SuperketMps t = s;
    t.canonicalize(c);
    EXPECT_LT((t.to_dense() - s.to_dense()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(t.max_bond_dim(), 1);
  }
}

TEST(SchmidtSpectrum, ProductState) {
  SuperketMps s = SuperketMps::product_state(z_product({0.1, 0.2, 0.3, 0.4}));
  for (int cut = 0; cut < 3; ++cut) {
    const auto spec = s.schmidt_spectrum(cut);
    ASSERT_EQ(spec.values.size(), 1u);
    EXPECT_NEAR(spec.values[0], 1.0, 1e-15);
    EXPECT_NEAR(osee(spec), 0.0, 1e-15);
  }
}

TEST(SchmidtSpectrum, IdentityPlusXX) {
  SiteTensor a(1, 2), b(2, 1);
  a(0, 0, 0) = 1.0;
  a(0, 1, 1) = 1.0;
  b(0, 0, 0) = 1.0;
  b(1, 1, 0) = 1.0;
  SuperketMps s = SuperketMps::from_parts({a, b}, {Eigen::VectorXd::Ones(2)}, std::nullopt, 16, 0.0);
  const auto spec = s.schmidt_spectrum(0);
  ASSERT_EQ(spec.values.size(), 2u);
  EXPECT_NEAR(spec.values[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(spec.values[1], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(osee(spec), 1.0, 1e-14);
  EXPECT_NEAR(s.osee(0), 1.0, 1e-14);
}

TEST(SchmidtSpectrum, NormalizedAndMatchesDenseSvd) {
  Rng rng(29);
  SuperketMps s = random_superket(5, 6, rng);
  const RVector dense = s.to_dense();
  for (int cut = 0; cut < 4; ++cut) {
    const auto spec = s.schmidt_spectrum(cut);
    const Eigen::Index rows = pow4(cut + 1);
    const RMatrix m = Eigen::Map<const RMatrix>(dense.data(), rows, dense.size() / rows);
    RVector sv = Eigen::JacobiSVD<RMatrix>(m).singularValues();
    sv /= sv.norm();
    double total = 0.0;
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
      EXPECT_NEAR(spec.values[k], sv(static_cast<Eigen::Index>(k)), 1e-12);
      total += spec.values[k] * spec.values[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(ExpectPauliString, ScaleIndependentAndMatchesCoefficients) {
  Rng rng(30);
  SuperketMps s = random_superket(5, 6, rng);
  const RVector dense = s.to_dense();
  for (int k = 0; k < 30; ++k) {
    const auto str = testing::random_string(5, 1 + k % 5, rng);
    const double e = s.expect_pauli_string(str);
    EXPECT_NEAR(e, dense(testing::dense_index(str)) / dense(0), 1e-12 * (1 + std::abs(e)));
    EXPECT_NEAR(s.coefficient(str), dense(testing::dense_index(str)), 1e-12 * (1 + std::abs(e)));
  }
  const auto str = testing::random_string(5, 3, rng);
  const double e = s.expect_pauli_string(str);
  s.mutable_tensor(2).data() *= 7.5;
  EXPECT_NEAR(s.expect_pauli_string(str), e, 1e-13 * (1 + std::abs(e)));
}

TEST(IdentityEnvironments, AgreeWithDirectContraction) {
  Rng rng(31);
  SuperketMps s = random_superket(6, 7, rng);
  const IdentityEnvironments env(s);
  for (int first = 0; first < 5; ++first) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const std::vector<PauliIndex> ops = {PauliIndex(a), PauliIndex(b)};
        const std::vector<PauliFactor> str = {{first, PauliIndex(a)}, {first + 1, PauliIndex(b)}};
        EXPECT_NEAR(env.expect(first, ops), s.expect_pauli_string(str), 1e-12);
      }
    }
  }
}

TEST(RenormalizeIdentity, ScalesAndGuards) {
  SuperketMps s = SuperketMps::product_state(z_product({0.1, 0.2}));
  s.mutable_tensor(0).data() *= 2.0;
  EXPECT_NEAR(s.renormalize_identity(), 2.0, 1e-15);
  EXPECT_NEAR(s.identity_coefficient(), 1.0, 1e-15);
  EXPECT_NEAR(s.renormalize_identity(), 1.0, 1e-15);
  EXPECT_NEAR(s.identity_coefficient(), 1.0, 1e-15);
  s.mutable_tensor(1).data() *= 1e-301;
  EXPECT_THROW(s.renormalize_identity(), StateCollapseError);
}

TEST(FromParts, ValidatesShapes) {
  SiteTensor a(1, 2), b(3, 1);
  EXPECT_THROW(SuperketMps::from_parts({a, b}, {Eigen::VectorXd::Ones(2)}, std::nullopt, 8, 0.0),
               std::invalid_argument);
  SiteTensor c(2, 1);
  EXPECT_THROW(SuperketMps::from_parts({c}, {}, std::nullopt, 8, 0.0), std::invalid_argument);
  EXPECT_THROW(SuperketMps::from_parts({a, c}, {}, std::nullopt, 8, 0.0), std::invalid_argument);
  EXPECT_THROW(SuperketMps::from_parts({a, c}, {Eigen::VectorXd::Ones(2)}, 5, 8, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace nessmpo
