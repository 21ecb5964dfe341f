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

#include "nessmpo/tebd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

namespace nessmpo {

namespace {

std::int64_t ipow4(int n) { return std::int64_t{1} << (2 * n); }

// Embeds a k-site superop (k = 1, 2) acting on sites [first, first + k).
void add_embedded(RMatrix& out, int n, int first, const RMatrix& g) {
  const int k = g.rows() == 4 ? 1 : 2;
  const std::int64_t dim = ipow4(n);
  const std::int64_t low = ipow4(first);
  const std::int64_t span = ipow4(k);
  for (std::int64_t col = 0; col < dim; ++col) {
    const std::int64_t local = (col / low) % span;
    const std::int64_t rest = col - local * low;
    for (std::int64_t r = 0; r < span; ++r) {
      const double v = g(r, local);
      if (v != 0.0) out(rest + r * low, col) += v;
    }
  }
}

struct Entry {
  bool is_x;
  double coef;
};

}  // namespace

LocalGenerators assemble_local_liouvilleans(const ModelSpec& model, const std::optional<BathSpec>& bath) {
  model.validate();
  LocalGenerators gens;
  gens.n = model.n;
  for (const auto& term : build_bond_terms(model)) gens.bonds.push_back(hamiltonian_superop(term));
  if (!bath) return gens;
  bath->validate();
  switch (bath->kind) {
    case BathKind::kSingleSpin:
      gens.sites.push_back({0, single_spin_bath_generator(bath->mu_left, bath->gamma)});
      gens.sites.push_back({model.n - 1, single_spin_bath_generator(bath->mu_right, bath->gamma)});
      break;
    case BathKind::kTwoSpin: {
      if (model.n < 4) throw std::invalid_argument("two-spin baths need at least 4 sites");
      const CMatrix left = two_spin_target(*bath, model, ChainEnd::kLeft);
      const CMatrix right = two_spin_target(*bath, model, ChainEnd::kRight);
      gens.bonds.front() = gens.bonds.front() + two_spin_bath_generator(left, bath->gamma);
      gens.bonds.back() = gens.bonds.back() + two_spin_bath_generator(right, bath->gamma);
      break;
    }
  }
  return gens;
}

RMatrix embed_local_generators(const LocalGenerators& gens) {
  if (gens.n < 1 || gens.n > 6) throw std::invalid_argument("embed_local_generators: n must be in [1, 6]");
  const std::int64_t dim = ipow4(gens.n);
  RMatrix out = RMatrix::Zero(dim, dim);
  for (std::size_t b = 0; b < gens.bonds.size(); ++b) {
    add_embedded(out, gens.n, static_cast<int>(b), gens.bonds[b].matrix());
  }
  for (const auto& s : gens.sites) add_embedded(out, gens.n, s.site, s.generator.matrix());
  return out;
}

bool TrotterPlan::groups_disjoint() const {
  auto check = [this](const GateGroup& g) {
    std::vector<int> used(static_cast<std::size_t>(n_), 0);
    for (const Gate& gate : g.gates) {
      const int width = gate.kind == GateKind::kBond ? 2 : 1;
      for (int s = gate.index; s < gate.index + width; ++s) {
        if (used[static_cast<std::size_t>(s)]++) return false;
      }
    }
    return true;
  };
  return std::all_of(groups_.begin(), groups_.end(), check) && check(fused_);
}

TrotterPlan build_trotter_plan(const LocalGenerators& gens, double tau, int order) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("trotter plan: tau must be > 0");
  if (order != 2 && order != 4) {
    throw std::invalid_argument("trotter plan: unsupported order " + std::to_string(order));
  }
  const int n = gens.n;
  if (static_cast<int>(gens.bonds.size()) != n - 1) throw std::invalid_argument("trotter plan: expected n-1 bonds");

  // Split into X (even bonds) and Y (odd bonds); one-site terms go to the
  // group that leaves their site untouched, preferring Y.
  std::vector<TrotterPlan::Term> xs, ys;
  std::vector<bool> in_x(static_cast<std::size_t>(n), false), in_y(static_cast<std::size_t>(n), false);
  for (int b = 0; b + 1 < n; ++b) {
    auto& list = b % 2 == 0 ? xs : ys;
    auto& used = b % 2 == 0 ? in_x : in_y;
    list.push_back({GateKind::kBond, b, b});
    used[static_cast<std::size_t>(b)] = used[static_cast<std::size_t>(b + 1)] = true;
  }
  for (std::size_t i = 0; i < gens.sites.size(); ++i) {
    const int site = gens.sites[i].site;
    if (site < 0 || site >= n) throw std::invalid_argument("trotter plan: one-site term out of range");
    if (!in_y[static_cast<std::size_t>(site)]) {
      ys.push_back({GateKind::kSite, site, static_cast<int>(i)});
      in_y[static_cast<std::size_t>(site)] = true;
    } else if (!in_x[static_cast<std::size_t>(site)]) {
      xs.push_back({GateKind::kSite, site, static_cast<int>(i)});
      in_x[static_cast<std::size_t>(site)] = true;
    } else {
      throw std::invalid_argument("trotter plan: overlapping one-site terms on site " + std::to_string(site));
    }
  }
  auto by_position = [](const TrotterPlan::Term& a, const TrotterPlan::Term& b) { return a.index < b.index; };
  std::sort(xs.begin(), xs.end(), by_position);
  std::sort(ys.begin(), ys.end(), by_position);

  std::vector<Entry> seq;
  if (order == 2) {
    seq = {{true, 0.5}, {false, 1.0}, {true, 0.5}};
  } else {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = 1.0 - 2.0 * w1;
    seq = {{true, w1 / 2}, {false, w1}, {true, (w1 + w0) / 2}, {false, w0},
           {true, (w0 + w1) / 2}, {false, w1}, {true, w1 / 2}};
  }
  std::vector<Entry> merged;
  for (const Entry& e : seq) {
    if ((e.is_x ? xs : ys).empty()) continue;
    if (!merged.empty() && merged.back().is_x == e.is_x) {
      merged.back().coef += e.coef;
    } else {
      merged.push_back(e);
    }
  }

  // Deduplicate identical generators so uniform chains share propagators.
  std::vector<int> bond_class(gens.bonds.size()), site_class(gens.sites.size());
  for (std::size_t i = 0; i < gens.bonds.size(); ++i) {
    bond_class[i] = static_cast<int>(i);
    for (std::size_t j = 0; j < i; ++j) {
      if (gens.bonds[j].matrix() == gens.bonds[i].matrix()) {
        bond_class[i] = bond_class[j];
        break;
      }
    }
  }
  for (std::size_t i = 0; i < gens.sites.size(); ++i) {
    site_class[i] = static_cast<int>(i);
    for (std::size_t j = 0; j < i; ++j) {
      if (gens.sites[j].generator.matrix() == gens.sites[i].generator.matrix()) {
        site_class[i] = site_class[j];
        break;
      }
    }
  }

  TrotterPlan plan;
  plan.tau_ = tau;
  plan.order_ = order;
  plan.n_ = n;
  std::map<std::tuple<int, int, double>, int> cache;
  auto materialize = [&](const std::vector<TrotterPlan::Term>& terms, double coef) {
    GateGroup group;
    for (const auto& t : terms) {
      const bool bond = t.kind == GateKind::kBond;
      const int cls = bond ? bond_class[static_cast<std::size_t>(t.generator)]
                           : site_class[static_cast<std::size_t>(t.generator)];
      const auto key = std::make_tuple(bond ? 0 : 1, cls, coef);
      auto it = cache.find(key);
      if (it == cache.end()) {
        const LocalSuperop& g = bond ? gens.bonds[static_cast<std::size_t>(cls)]
                                     : gens.sites[static_cast<std::size_t>(cls)].generator;
        plan.propagators_.push_back(superop_exponential(g, coef * tau).matrix());
        it = cache.emplace(key, static_cast<int>(plan.propagators_.size()) - 1).first;
      }
      group.gates.push_back({t.kind, t.index, it->second});
    }
    return group;
  };
  for (const Entry& e : merged) {
    plan.groups_.push_back(materialize(e.is_x ? xs : ys, e.coef));
    plan.coefficients_.push_back(e.coef);
  }
  if (merged.size() >= 2 && merged.front().is_x == merged.back().is_x) {
    plan.fused_ = materialize(merged.front().is_x ? xs : ys, merged.front().coef + merged.back().coef);
  }
  return plan;
}

namespace {

double apply_group(SuperketMps& state, const TrotterPlan& plan, const GateGroup& group, const StepOptions& o) {
  double discarded = 0.0;
  if (o.parallel_bonds) {
    std::vector<SuperketMps::BondGate> bonds;
    for (const Gate& g : group.gates) {
      if (g.kind == GateKind::kSite) {
        state.apply_one_site_gate(g.index, plan.propagator(g.propagator));
      } else {
        bonds.push_back({g.index, &plan.propagator(g.propagator)});
      }
    }
    discarded += state.apply_disjoint_two_site_gates(bonds, o.dmax, o.trunc_eps, o.threads, o.svd);
    return discarded;
  }

  if (!state.canonical_center()) state.canonicalize(0);
  const bool ascending = *state.canonical_center() <= (state.size() - 1) / 2;
  const auto& gates = group.gates;
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const Gate& g = ascending ? gates[k] : gates[gates.size() - 1 - k];
    if (g.kind == GateKind::kSite) {
      state.move_center(g.index);
      state.apply_one_site_gate(g.index, plan.propagator(g.propagator));
    } else {
      discarded += state.apply_two_site_gate(g.index, plan.propagator(g.propagator), o.dmax, o.trunc_eps,
                                             ascending ? SplitDirection::kRight : SplitDirection::kLeft, o.svd);
    }
  }
  return discarded;
}

void finish_step(SuperketMps& state, const StepOptions& o, double step_discarded, StepReport& report) {
  if (o.parallel_bonds) {
    const double before = state.discarded_weight_total();
    state.canonicalize(0, std::make_pair(o.dmax, o.trunc_eps));
    step_discarded += state.discarded_weight_total() - before;
  }
  const double c0 = state.renormalize_identity();
  report.steps += 1;
  report.discarded_weight += step_discarded;
  report.max_step_discarded = std::max(report.max_step_discarded, step_discarded);
  report.identity_factor_min = std::min(report.identity_factor_min, c0);
  report.identity_factor_max = std::max(report.identity_factor_max, c0);
  report.max_bond_dim = std::max(report.max_bond_dim, state.max_bond_dim());
}

}  // namespace

StepReport step(SuperketMps& state, const TrotterPlan& plan, const StepOptions& options) {
  return advance(state, plan, 1, options);
}

StepReport advance(SuperketMps& state, const TrotterPlan& plan, int count, const StepOptions& options) {
  if (state.size() != plan.n()) throw std::invalid_argument("advance: plan and state sizes differ");
  StepReport report;
  const auto& groups = plan.groups();
  if (count <= 0 || groups.empty()) return report;
  const bool fuse = !plan.fused_boundary().gates.empty();
  const std::size_t m = groups.size();

  double pending = apply_group(state, plan, groups[0], options);
  for (int k = 0; k < count; ++k) {
    const std::size_t last = fuse ? m - 1 : m;
    for (std::size_t i = 1; i < last; ++i) pending += apply_group(state, plan, groups[i], options);
    if (!fuse) {
      finish_step(state, options, pending, report);
      pending = k + 1 < count ? apply_group(state, plan, groups[0], options) : 0.0;
      continue;
    }
    if (k + 1 < count) {
      // The fused group straddles two steps; its weight is charged to the
      // step it completes.
      pending += apply_group(state, plan, plan.fused_boundary(), options);
    } else {
      pending += apply_group(state, plan, groups[m - 1], options);
    }
    finish_step(state, options, pending, report);
    pending = 0.0;
  }
  return report;
}

std::vector<Eigen::Vector4d> maximally_mixed_coeffs(int n) {
  return std::vector<Eigen::Vector4d>(static_cast<std::size_t>(n), Eigen::Vector4d(1.0, 0.0, 0.0, 0.0));
}

EvolveResult evolve_to_ness(SuperketMps& state, const TrotterPlan& plan, const ConvergenceProbe& probe,
                            const EvolveOptions& options, RunDiagnostics& diagnostics) {
  const ConvergenceCriteria& c = options.criteria;
  if (!(c.window > 0.0)) throw std::invalid_argument("evolve: window must be > 0");
  const double t_max = c.t_max > 0.0 ? c.t_max : 20.0 * state.size();
  const int window_steps = std::max(1, static_cast<int>(std::lround(c.window / plan.tau())));
  constexpr int kChunk = 20;

  int dmax = std::max(state.dmax(), options.dmax.dmax_init);
  dmax = std::min(dmax, std::max(options.dmax.dmax_cap, options.dmax.dmax_init));
  state.set_dmax(dmax);
  StepOptions so;
  so.trunc_eps = options.trunc_eps;
  so.svd = options.svd;
  so.parallel_bonds = options.parallel_bonds;
  so.threads = options.threads;

  EvolveResult result;
  double t = options.t_start;
  std::int64_t step_index = 0;
  const int cut = std::max(0, state.size() / 2 - 1);

  ProbeSample prev = probe(state);
  while (t < t_max - 1e-9 * plan.tau()) {
    double window_discarded = 0.0;
    int done = 0;
    while (done < window_steps && t < t_max - 1e-9 * plan.tau()) {
      const int remaining = static_cast<int>(std::ceil((t_max - t) / plan.tau() - 1e-9));
      const int count = std::min({kChunk, window_steps - done, remaining});
      so.dmax = dmax;
      const StepReport r = advance(state, plan, count, so);
      done += count;
      step_index += count;
      t = options.t_start + static_cast<double>(step_index) * plan.tau();
      window_discarded += r.discarded_weight;
      if (r.max_step_discarded > options.dmax.grow_threshold && dmax < options.dmax.dmax_cap) {
        dmax = std::min(options.dmax.dmax_cap, dmax + std::max(1, options.dmax.increment));
        state.set_dmax(dmax);
      }
    }

    const ProbeSample s = probe(state);
    DiagnosticsRecord rec;
    rec.t = t;
    rec.d_max = state.max_bond_dim();
    rec.discarded_weight = window_discarded;
    rec.j_mean = s.mean_current;
    rec.j_spread = s.current_spread;
    const double jscale = std::max(std::abs(s.mean_current), c.zero_current_floor);
    const double drop = std::abs(s.profile_right - s.profile_left);
    const double pscale = std::max(drop, c.zero_current_floor);
    rec.drift = std::max({std::abs(s.mean_current - prev.mean_current) / jscale,
                          std::abs(s.profile_left - prev.profile_left) / pscale,
                          std::abs(s.profile_right - prev.profile_right) / pscale});
    rec.osee_center = state.size() > 1 ? state.osee(cut) : 0.0;
    diagnostics.records.push_back(rec);
    prev = s;

    const bool uniform = s.max_abs_current < c.zero_current_floor || s.current_spread < c.tol_uniformity;
    result.converged = uniform && rec.drift < c.tol_drift;
    const bool keep_going = !options.on_window || options.on_window(state, rec);
    if (result.converged || !keep_going) break;
  }
  result.t = t;
  result.dmax = dmax;
  return result;
}

}  // namespace nessmpo
