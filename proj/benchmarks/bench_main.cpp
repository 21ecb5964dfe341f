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
#include <random>
#include <stdexcept>

#include <benchmark/benchmark.h>

#include "nessmpo/config.hpp"
#include "nessmpo/linalg.hpp"
#include "nessmpo/runner.hpp"
#include "nessmpo/tebd.hpp"

namespace {

using namespace nessmpo;

RunConfig driven_chain(int n) {
  RunConfig c;
  c.model.n = n;
  c.model.delta = 1.5;
  c.bath.mu_left = 0.2;
  c.bath.mu_right = -0.2;
  return c;
}

// A driven XXZ state evolved until its bond dimension saturates at d.
SuperketMps saturated_state(int n, int d) {
  const RunConfig cfg = driven_chain(n);
  SuperketMps s = runner::initial_state(cfg);
  const TrotterPlan plan = build_trotter_plan(assemble_local_liouvilleans(cfg.model_spec(), cfg.bath_spec()), 0.05, 2);
  StepOptions so;
  so.dmax = d;
  so.trunc_eps = 0.0;
  for (int k = 0; k < 400 && s.max_bond_dim() < d; ++k) step(s, plan, so);
  step(s, plan, so);
  return s;
}

const Eigen::MatrixXd& bulk_gate(const TrotterPlan& plan) {
  for (int p = 0; p < static_cast<int>(plan.propagator_count()); ++p) {
    if (plan.propagator(p).rows() == 16) return plan.propagator(p);
  }
  throw std::logic_error("no two-site propagator");
}

void BM_TwoSiteGate(benchmark::State& st, SvdMethod method) {
  const int n = 16, d = static_cast<int>(st.range(0));
  const RunConfig cfg = driven_chain(n);
  const TrotterPlan plan = build_trotter_plan(assemble_local_liouvilleans(cfg.model_spec(), cfg.bath_spec()), 0.05, 2);
  const Eigen::MatrixXd& g = bulk_gate(plan);
  SuperketMps s = saturated_state(n, d);
  s.canonicalize(n / 2 - 1);
  for (auto _ : st) {
    benchmark::DoNotOptimize(s.apply_two_site_gate(n / 2 - 1, g, d, 0.0, SplitDirection::kRight, method));
    s.renormalize_identity();
  }
  st.counters["D"] = static_cast<double>(s.bond_dim(n / 2 - 1));
}
BENCHMARK_CAPTURE(BM_TwoSiteGate, exact, SvdMethod::kExact)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_TwoSiteGate, randomized, SvdMethod::kRandomized)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

// Bond matrix of size 4D x 4D with geometrically decaying spectrum.
Eigen::MatrixXd decaying_matrix(Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    return Eigen::MatrixXd(Eigen::MatrixXd::NullaryExpr(r, c, [&] { return normal(rng); }));
  };
  const Eigen::MatrixXd u = linalg::thin_qr(gaussian(m, m)).q, v = linalg::thin_qr(gaussian(m, m)).q;
  Eigen::VectorXd s(m);
  for (Eigen::Index i = 0; i < m; ++i) s(i) = std::pow(0.9, static_cast<double>(i));
  return u * s.asDiagonal() * v.transpose();
}

void BM_SvdExact(benchmark::State& st) {
  const Eigen::MatrixXd a = decaying_matrix(4 * st.range(0), 1);
  for (auto _ : st) benchmark::DoNotOptimize(linalg::thin_svd(a));
}
BENCHMARK(BM_SvdExact)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_SvdRandomized(benchmark::State& st) {
  const Eigen::Index d = st.range(0);
  const Eigen::MatrixXd a = decaying_matrix(4 * d, 1);
  for (auto _ : st) benchmark::DoNotOptimize(linalg::randomized_svd(a, d, 16, 2, 7));
}
BENCHMARK(BM_SvdRandomized)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_TrotterStep(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0)), d = static_cast<int>(st.range(1));
  const RunConfig cfg = driven_chain(n);
  const TrotterPlan plan = build_trotter_plan(assemble_local_liouvilleans(cfg.model_spec(), cfg.bath_spec()), 0.05, 4);
  SuperketMps s = saturated_state(n, d);
  StepOptions so;
  so.dmax = d;
  so.trunc_eps = 0.0;
  for (auto _ : st) benchmark::DoNotOptimize(step(s, plan, so));
}
BENCHMARK(BM_TrotterStep)->Args({16, 32})->Args({32, 32})->Args({32, 64})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
