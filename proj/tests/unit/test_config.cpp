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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "nessmpo/config.hpp"
#include "test_support.hpp"

namespace nessmpo {
namespace {

constexpr const char* kStaggered = R"(# staggered XXZ
[model]
kind = xxz
n = 24
delta = 0.5
field_pattern = staggered
field_values = 0, -0.5     # odd, even

[bath]
mu_left = 0.1
mu_right = -0.1

[evolve]
tau = 0.025
order = 4
dmax_cap = 120
svd = randomized
initial = mixed

[observe]
skip_left = 5
skip_right = 5

[output]
dir = /tmp/x
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseConfig, SectionsCommentsAndDefaults) {
  const RunConfig c = parse_config(kStaggered);
  EXPECT_EQ(c.model.kind, ModelKind::kXxz);
  EXPECT_EQ(c.model.n, 24);
  EXPECT_DOUBLE_EQ(c.model.delta, 0.5);
  EXPECT_EQ(c.model.field_pattern, "staggered");
  EXPECT_EQ(c.model.field_values, (std::vector<double>{0.0, -0.5}));
  EXPECT_DOUBLE_EQ(c.bath.mu_left, 0.1);
  EXPECT_EQ(c.evolve.order, 4);
  EXPECT_EQ(c.evolve.svd, SvdMethod::kRandomized);
  EXPECT_EQ(c.evolve.initial, InitialState::kMixed);
  EXPECT_EQ(c.evolve.dmax_cap, 120);
  EXPECT_EQ(c.evolve.dmax_init, 40);
  EXPECT_EQ(c.output.dir, "/tmp/x");
  EXPECT_NO_THROW(c.validate());

  const ModelSpec m = c.model_spec();
  EXPECT_DOUBLE_EQ(m.field(0), 0.0);
  EXPECT_DOUBLE_EQ(m.field(1), -0.5);
  const TransportSkips s = c.skips();
  EXPECT_EQ(s.left, 5);
  EXPECT_EQ(s.right, 5);
  EXPECT_DOUBLE_EQ(c.evolve_options().criteria.t_max, 480.0);
  EXPECT_EQ(c.evolve_options().svd, SvdMethod::kRandomized);
  EXPECT_DOUBLE_EQ(c.bath_spec().gamma, 1.0);
}

TEST(ParseConfig, DottedKeysWithoutSections) {
  const RunConfig c = parse_config("model.kind = tilted_ising\nmodel.n=12\nbath.kind = two_spin\nbath.t_left=20\n");
  EXPECT_EQ(c.model.kind, ModelKind::kTiltedIsing);
  EXPECT_EQ(c.model.n, 12);
  EXPECT_DOUBLE_EQ(c.bath_spec().gamma, 2.0);
  EXPECT_DOUBLE_EQ(c.bath.t_left, 20.0);
  EXPECT_EQ(c.skips().left, 4);
  EXPECT_EQ(c.skips().right, 5);
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("[model]\nn = 4\nbogus = 1\n").find("t.cfg:3:"), std::string::npos);
  EXPECT_NE(error_of("[model]\nn = 4\nbogus = 1\n").find("unknown key 'model.bogus'"), std::string::npos);
  EXPECT_NE(error_of("[model\n").find("t.cfg:1: unterminated"), std::string::npos);
  EXPECT_NE(error_of("\n\nno equals sign\n").find("t.cfg:3:"), std::string::npos);
  EXPECT_NE(error_of("model.n = four\n").find("expected an integer"), std::string::npos);
  EXPECT_NE(error_of("model.delta = 1.5x\n").find("expected a number"), std::string::npos);
  EXPECT_NE(error_of("evolve.svd = fast\n").find("svd must be"), std::string::npos);
  EXPECT_NE(error_of("model.kind = hubbard\n").find("model.kind"), std::string::npos);
  EXPECT_NE(error_of("evolve.parallel_bonds = maybe\n").find("boolean"), std::string::npos);
  EXPECT_NE(error_of(" = 3\n").find("empty key"), std::string::npos);
  EXPECT_NE(error_of("observe.energy_bond_endpoints = 5\n").find("two integers"), std::string::npos);
}

TEST(ParseConfig, TwoSpinTargets) {
  std::string row = "bath.target_left = ";
  for (int i = 0; i < 16; ++i) row += (i ? ", " : "") + std::string(i % 5 == 0 ? "0.25" : "0");
  RunConfig c = parse_config("model.kind = tilted_ising\nmodel.n = 6\nbath.kind = two_spin\n" + row + "\n");
  const BathSpec b = c.bath_spec();
  ASSERT_TRUE(b.target_left.has_value());
  EXPECT_LT((*b.target_left - CMatrix::Identity(4, 4) / 4.0).norm(), 1e-15);
  EXPECT_NO_THROW(c.validate());
  c.bath.target_right = {1.0, 2.0};
  EXPECT_THROW(c.bath_spec(), ConfigError);
}

TEST(Validate, RejectsInconsistentSettings) {
  auto bad = [](const std::string& text) {
    const RunConfig c = parse_config(text);
    EXPECT_THROW(c.validate(), ConfigError) << text;
  };
  bad("model.n = 1\n");
  bad("evolve.tau = 0\n");
  bad("evolve.order = 3\n");
  bad("evolve.dmax_init = 100\nevolve.dmax_cap = 50\n");
  bad("evolve.threads = 0\n");
  bad("evolve.trunc_eps = -1\n");
  bad("convergence.window = 0\n");
  bad("model.n = 6\nobserve.skip_left = 3\n");
  bad("model.n = 3\nmodel.kind = tilted_ising\nbath.kind = two_spin\n");
  bad("model.field_pattern = staggered\nmodel.field_values = 1\n");
  bad("model.n = 4\nmodel.field_pattern = explicit\nmodel.field_values = 1, 2\n");
  bad("bath.gamma = -1\n");
  bad("output.dir = \n");
  bad("output.checkpoint_every = -5\n");
  EXPECT_NO_THROW(parse_config("model.n = 4\nmodel.field_pattern = explicit\nmodel.field_values = 1,2,3,4\n").validate());
}

TEST(ToText, RoundTripsEveryKey) {
  RunConfig c = parse_config(kStaggered);
  c.observe.energy_bond_endpoints = std::make_pair(5, 5);
  c.bath.gamma = 0.7;
  const std::string text = to_text(c);
  const RunConfig d = parse_config(text);
  EXPECT_EQ(to_text(d), text);
  EXPECT_EQ(physics_digest(c), physics_digest(d));
  EXPECT_EQ(d.observe.skip_left.value_or(-1), 5);
  ASSERT_TRUE(d.observe.energy_bond_endpoints.has_value());
  EXPECT_EQ(*d.observe.energy_bond_endpoints, std::make_pair(5, 5));
  EXPECT_DOUBLE_EQ(*d.bath.gamma, 0.7);
  EXPECT_NE(text.find("[evolve]"), std::string::npos);
  EXPECT_NE(text.find("svd = randomized"), std::string::npos);
}

TEST(ToText, DoublesSurviveExactly) {
  RunConfig c;
  c.model.delta = 0.1 + 0.2;
  c.bath.mu_left = -1.0 / 3.0;
  const RunConfig d = parse_config(to_text(c));
  EXPECT_EQ(d.model.delta, c.model.delta);
  EXPECT_EQ(d.bath.mu_left, c.bath.mu_left);
}

TEST(PhysicsDigest, IgnoresNumericsButNotPhysics) {
  const RunConfig base = parse_config(kStaggered);
  RunConfig numerics = base;
  numerics.evolve.dmax_cap = 200;
  numerics.evolve.tau = 0.01;
  numerics.output.dir = "elsewhere";
  EXPECT_EQ(physics_digest(base), physics_digest(numerics));
  RunConfig physics = base;
  physics.bath.mu_left = 0.11;
  EXPECT_NE(physics_digest(base), physics_digest(physics));
  physics = base;
  physics.model.n = 26;
  EXPECT_NE(physics_digest(base), physics_digest(physics));
}

TEST(EnvOverrides, ApplyNamespacedVariables) {
  RunConfig c = parse_config(kStaggered);
  std::string a = "NESS_EVOLVE__DMAX_CAP=160", b = "NESS_BATH__MU_LEFT=0.3", other = "PATH=/usr/bin",
              malformed = "NESS_NOSEPARATOR=1";
  char* env[] = {a.data(), b.data(), other.data(), malformed.data(), nullptr};
  apply_env_overrides(c, env);
  EXPECT_EQ(c.evolve.dmax_cap, 160);
  EXPECT_DOUBLE_EQ(c.bath.mu_left, 0.3);

  std::string bad = "NESS_EVOLVE__TAU=fast";
  char* env2[] = {bad.data(), nullptr};
  try {
    apply_env_overrides(c, env2);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("NESS_EVOLVE__TAU"), std::string::npos);
  }
  apply_env_overrides(c, nullptr);
}

TEST(LoadConfig, ReadsFilesAndReportsMissing) {
  const auto dir = testing::scratch_dir("config");
  const auto path = dir / "run.cfg";
  {
    std::ofstream out(path);
    out << kStaggered;
  }
  const RunConfig c = load_config(path);
  EXPECT_EQ(c.model.n, 24);
  EXPECT_THROW(load_config(dir / "missing.cfg"), ConfigError);
  std::ofstream(dir / "bad.cfg") << "[model]\nn = x\n";
  try {
    load_config(dir / "bad.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.cfg:2:"), std::string::npos);
  }
}

TEST(ShippedConfigs, ParseAndValidate) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(NESSMPO_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW(load_config(entry.path()).validate()) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 4);
}

}  // namespace
}  // namespace nessmpo
