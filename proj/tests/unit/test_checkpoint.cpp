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

#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "nessmpo/checkpoint.hpp"
#include "test_support.hpp"

namespace nessmpo {
namespace {

using testing::Rng;

std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& b) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
}

Checkpoint sample(Rng& rng) {
  Checkpoint ck;
  ck.t = 12.375;
  ck.digest = 0xfeedfacecafebeefull;
  ck.config_text = "[model]\nn = 6\n";
  ck.state = testing::random_superket(6, 5, rng);
  ck.state.set_dmax(33);
  return ck;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(91);
  const auto dir = testing::scratch_dir("ckpt");
  for (int trial = 0; trial < 5; ++trial) {
    Checkpoint ck = sample(rng);
    if (trial % 2) ck.state.canonicalize(trial % 6);
    const auto path = dir / ("s" + std::to_string(trial) + ".ckpt");
    save_checkpoint(path, ck);
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    const Checkpoint back = load_checkpoint(path);
    EXPECT_EQ(back.t, ck.t);
    EXPECT_EQ(back.digest, ck.digest);
    EXPECT_EQ(back.config_text, ck.config_text);
    EXPECT_EQ(back.state.size(), ck.state.size());
    EXPECT_EQ(back.state.dmax(), 33);
    EXPECT_EQ(back.state.canonical_center(), ck.state.canonical_center());
    EXPECT_EQ(back.state.discarded_weight_total(), ck.state.discarded_weight_total());
    for (int i = 0; i < ck.state.size(); ++i) {
      EXPECT_EQ(back.state.tensor(i).data(), ck.state.tensor(i).data());
    }
    for (int b = 0; b + 1 < ck.state.size(); ++b) EXPECT_EQ(back.state.bond_lambdas(b), ck.state.bond_lambdas(b));
    EXPECT_EQ(back.state.to_dense(), ck.state.to_dense());
  }
}

TEST(Checkpoint, OverwritesExistingFile) {
  Rng rng(92);
  const auto path = testing::scratch_dir("ckpt_over") / "a.ckpt";
  Checkpoint ck = sample(rng);
  save_checkpoint(path, ck);
  ck.t = 99.0;
  save_checkpoint(path, ck);
  EXPECT_EQ(load_checkpoint(path).t, 99.0);
}

TEST(Checkpoint, EveryTruncationIsRejected) {
  Rng rng(93);
  const auto dir = testing::scratch_dir("ckpt_trunc");
  Checkpoint ck;
  ck.config_text = "x";
  ck.state = testing::random_superket(3, 2, rng);
  save_checkpoint(dir / "full.ckpt", ck);
  const auto bytes = read_bytes(dir / "full.ckpt");
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    write_bytes(dir / "cut.ckpt", std::vector<char>(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(len)));
    EXPECT_THROW(load_checkpoint(dir / "cut.ckpt"), CheckpointError) << len;
  }
  auto longer = bytes;
  longer.push_back('!');
  write_bytes(dir / "long.ckpt", longer);
  EXPECT_THROW(load_checkpoint(dir / "long.ckpt"), CheckpointError);
}

TEST(Checkpoint, HeaderCorruptionIsRejected) {
  Rng rng(94);
  const auto dir = testing::scratch_dir("ckpt_corrupt");
  save_checkpoint(dir / "ok.ckpt", sample(rng));
  const auto bytes = read_bytes(dir / "ok.ckpt");

  auto magic = bytes;
  magic[0] = 'X';
  write_bytes(dir / "magic.ckpt", magic);
  EXPECT_THROW(load_checkpoint(dir / "magic.ckpt"), CheckpointError);

  auto version = bytes;
  version[8] = 7;
  write_bytes(dir / "version.ckpt", version);
  EXPECT_THROW(load_checkpoint(dir / "version.ckpt"), CheckpointError);

  auto sites = bytes;
  sites[12] = 0;
  write_bytes(dir / "sites.ckpt", sites);
  EXPECT_THROW(load_checkpoint(dir / "sites.ckpt"), CheckpointError);

  auto trailer = bytes;
  trailer.back() = 'Z';
  write_bytes(dir / "trailer.ckpt", trailer);
  EXPECT_THROW(load_checkpoint(dir / "trailer.ckpt"), CheckpointError);

  EXPECT_THROW(load_checkpoint(dir / "does_not_exist.ckpt"), CheckpointError);
}

}  // namespace
}  // namespace nessmpo
