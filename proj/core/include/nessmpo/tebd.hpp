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

#include <functional>
#include <optional>
#include <vector>

#include "nessmpo/baths.hpp"
#include "nessmpo/models.hpp"
#include "nessmpo/observables.hpp"
#include "nessmpo/superket.hpp"

namespace nessmpo {

/// Local pieces of the Liouvillean: one 16x16 generator per bond (two-spin
/// baths already folded into the edge bonds) and 4x4 one-site generators
/// for single-spin baths.
struct LocalGenerators {
  struct SiteTerm {
    int site;
    LocalSuperop generator;
  };

  int n = 0;
  std::vector<LocalSuperop> bonds;
  std::vector<SiteTerm> sites;
};

/// Throws std::invalid_argument for a two-spin bath on fewer than 4 sites.
LocalGenerators assemble_local_liouvilleans(const ModelSpec& model, const std::optional<BathSpec>& bath);

/// Generators with a single-site representation: the sum of all local
/// pieces embedded into the full chain, as a dense 4^n x 4^n matrix (n <= 6).
RMatrix embed_local_generators(const LocalGenerators& gens);

enum class GateKind { kBond, kSite };

struct Gate {
  GateKind kind;
  int index;       // bond or site
  int propagator;  // index into TrotterPlan::propagator
};

/// Gates with pairwise disjoint supports.
struct GateGroup {
  std::vector<Gate> gates;
};

/// One Trotter step as an ordered list of commuting gate groups.
///
/// The generator is split into X (even bonds 0, 2, ... and the one-site
/// terms they do not touch) and Y (odd bonds and the remaining one-site
/// terms). Order 2 is X/2 Y X/2; order 4 is the triple-jump composition of
/// order-2 steps with w1 = 1/(2 - 2^(1/3)), w0 = 1 - 2 w1, adjacent X halves
/// merged. Consecutive steps share their boundary X group, which
/// fused_boundary() provides at the combined coefficient.
class TrotterPlan {
 public:
  struct Term {
    GateKind kind;
    int index;
    int generator;  // index into bonds or sites of the source generators
  };

  double tau() const { return tau_; }
  int order() const { return order_; }
  int n() const { return n_; }

  const std::vector<GateGroup>& groups() const { return groups_; }
  const GateGroup& fused_boundary() const { return fused_; }
  const RMatrix& propagator(int id) const { return propagators_.at(static_cast<std::size_t>(id)); }
  std::size_t propagator_count() const { return propagators_.size(); }

  /// Per-group coefficients in units of tau; sums to 1 per term.
  const std::vector<double>& group_coefficients() const { return coefficients_; }

  /// Structural check that every group acts on disjoint supports.
  bool groups_disjoint() const;

 private:
  friend TrotterPlan build_trotter_plan(const LocalGenerators& gens, double tau, int order);

  double tau_ = 0.0;
  int order_ = 2;
  int n_ = 0;
  std::vector<GateGroup> groups_;
  std::vector<double> coefficients_;
  GateGroup fused_;
  std::vector<RMatrix> propagators_;
};

/// Throws std::invalid_argument on tau <= 0 or order not in {2, 4}.
TrotterPlan build_trotter_plan(const LocalGenerators& gens, double tau, int order);

struct StepOptions {
  int dmax = 80;
  double trunc_eps = 1e-10;
  SvdMethod svd = SvdMethod::kAuto;
  bool parallel_bonds = false;
  int threads = 1;
};

struct StepReport {
  int steps = 0;
  double discarded_weight = 0.0;      // summed relative discarded weight
  double max_step_discarded = 0.0;    // largest per-step total
  double identity_factor_min = 1.0;   // identity coefficient before each renormalization
  double identity_factor_max = 1.0;
  Eigen::Index max_bond_dim = 1;
};

/// One full Trotter step followed by identity renormalization.
StepReport step(SuperketMps& state, const TrotterPlan& plan, const StepOptions& options);

/// `count` consecutive steps with the shared boundary groups fused. The
/// state on return is the same as after `count` calls to step() up to
/// Trotter-irrelevant regrouping.
StepReport advance(SuperketMps& state, const TrotterPlan& plan, int count, const StepOptions& options);

struct ConvergenceCriteria {
  double tol_uniformity = 0.02;
  double tol_drift = 0.005;
  double window = 10.0;
  double t_max = 0.0;               // 0 means 20 n
  double zero_current_floor = 1e-10;
};

struct DmaxPolicy {
  int dmax_init = 80;
  int dmax_cap = 80;
  int increment = 20;
  double grow_threshold = 1e-7;     // per-step discarded weight triggering growth
};

struct DiagnosticsRecord {
  double t = 0.0;
  Eigen::Index d_max = 0;
  double discarded_weight = 0.0;    // summed over the preceding window
  double j_mean = 0.0;
  double j_spread = 0.0;
  double drift = 0.0;
  double osee_center = 0.0;
};

struct RunDiagnostics {
  std::vector<DiagnosticsRecord> records;
};

struct EvolveResult {
  bool converged = false;
  double t = 0.0;
  int dmax = 0;
};

struct EvolveOptions {
  ConvergenceCriteria criteria;
  DmaxPolicy dmax;
  double trunc_eps = 1e-10;
  SvdMethod svd = SvdMethod::kAuto;
  bool parallel_bonds = false;
  int threads = 1;
  double t_start = 0.0;
  /// Called after every window with the latest record; returning false
  /// stops an unconverged evolution early.
  std::function<bool(const SuperketMps&, const DiagnosticsRecord&)> on_window;
};

/// Evolve until the probed current is uniform and the window-to-window
/// drift is below tolerance, or until t_max. The starting state is probed
/// too, so the first decision happens after one window.
EvolveResult evolve_to_ness(SuperketMps& state, const TrotterPlan& plan, const ConvergenceProbe& probe,
                            const EvolveOptions& options, RunDiagnostics& diagnostics);

/// Per-site Pauli coefficients of the infinite-temperature state.
std::vector<Eigen::Vector4d> maximally_mixed_coeffs(int n);

}  // namespace nessmpo
