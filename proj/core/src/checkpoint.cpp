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

#include "nessmpo/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace nessmpo {

namespace {

constexpr std::array<char, 8> kMagic{'N', 'E', 'S', 'S', 'C', 'K', 'P', 'T'};
constexpr std::array<char, 8> kTrailer{'N', 'E', 'S', 'S', 'E', 'N', 'D', '\0'};
constexpr std::uint64_t kMaxBond = 1u << 20;

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<char>& data() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> buf) : buf_(std::move(buf)) {}
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw CheckpointError("checkpoint is truncated");
  }
  void bytes(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(buf_[pos_ + i])} << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(buf_[pos_ + i])} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const SuperketMps& s = ckpt.state;
  Writer w;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(s.size()));
  w.f64(ckpt.t);
  w.u64(ckpt.digest);
  w.i32(s.dmax());
  w.f64(s.discarded_weight_total());
  w.i32(s.canonical_center() ? *s.canonical_center() : -1);
  w.u64(ckpt.config_text.size());
  w.bytes(ckpt.config_text.data(), ckpt.config_text.size());
  for (int i = 0; i < s.size(); ++i) {
    const SiteTensor& t = s.tensor(i);
    w.u64(static_cast<std::uint64_t>(t.left()));
    w.u64(static_cast<std::uint64_t>(t.right()));
    for (Eigen::Index k = 0; k < t.data().size(); ++k) w.f64(t.data()(k));
  }
  for (int b = 0; b + 1 < s.size(); ++b) {
    const Eigen::VectorXd& l = s.bond_lambdas(b);
    w.u64(static_cast<std::uint64_t>(l.size()));
    for (Eigen::Index k = 0; k < l.size(); ++k) w.f64(l(k));
  }
  w.bytes(kTrailer.data(), kTrailer.size());

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
    out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
    if (!out) throw CheckpointError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + path.string());
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw CheckpointError(path.string() + " is not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t n = r.u32();
  if (n == 0 || n > 100000) throw CheckpointError("implausible chain length in checkpoint");
  Checkpoint ck;
  ck.t = r.f64();
  ck.digest = r.u64();
  const int dmax = r.i32();
  const double discarded = r.f64();
  const int center = r.i32();
  const std::uint64_t text_len = r.u64();
  r.need(text_len);
  ck.config_text.resize(text_len);
  r.bytes(ck.config_text.data(), text_len);

  std::vector<SiteTensor> tensors;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t left = r.u64();
    const std::uint64_t right = r.u64();
    if (left == 0 || right == 0 || left > kMaxBond || right > kMaxBond) {
      throw CheckpointError("implausible bond dimension in checkpoint");
    }
    r.need(left * right * 4 * 8);
    SiteTensor t(static_cast<Eigen::Index>(left), static_cast<Eigen::Index>(right));
    for (Eigen::Index k = 0; k < t.data().size(); ++k) t.data()(k) = r.f64();
    tensors.push_back(std::move(t));
  }
  std::vector<Eigen::VectorXd> lambdas;
  for (std::uint32_t b = 0; b + 1 < n; ++b) {
    const std::uint64_t len = r.u64();
    if (len > kMaxBond) throw CheckpointError("implausible bond vector in checkpoint");
    r.need(len * 8);
    Eigen::VectorXd l(static_cast<Eigen::Index>(len));
    for (Eigen::Index k = 0; k < l.size(); ++k) l(k) = r.f64();
    lambdas.push_back(std::move(l));
  }
  std::array<char, 8> trailer{};
  r.bytes(trailer.data(), trailer.size());
  if (trailer != kTrailer || !r.at_end()) throw CheckpointError("checkpoint trailer is corrupt");

  try {
    ck.state = SuperketMps::from_parts(std::move(tensors), std::move(lambdas),
                                       center >= 0 ? std::optional<int>(center) : std::nullopt, dmax, discarded);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("inconsistent checkpoint: ") + e.what());
  }
  return ck;
}

}  // namespace nessmpo
