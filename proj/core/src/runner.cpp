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

#include "nessmpo/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "nessmpo/baths.hpp"
#include "nessmpo/checkpoint.hpp"
#include "nessmpo/oracle.hpp"
#include "nessmpo/tebd.hpp"

namespace nessmpo::runner {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCheckpointName = "checkpoint.bin";
constexpr const char* kDiagnosticsHeader = "t,D_max,discarded_weight,j_mean,j_spread,osee_center\n";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<Eigen::Vector4d> initial_local_coeffs(const RunConfig& cfg) {
  const int n = cfg.model.n;
  std::vector<Eigen::Vector4d> local = maximally_mixed_coeffs(n);
  if (cfg.evolve.initial == InitialState::kLinear && cfg.bath.kind == BathKind::kSingleSpin) {
    const double left = cfg.bath.mu_left;
    const double right = cfg.bath.mu_right;
    for (int l = 0; l < n; ++l) {
      const double x = n > 1 ? static_cast<double>(l) / (n - 1) : 0.0;
      local[static_cast<std::size_t>(l)](3) = -std::tanh(left + (right - left) * x);
    }
  }
  return local;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".nessmpo-write-test";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

void write_series(const fs::path& path, const char* header, const std::vector<double>& values, int first_label) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << "\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << first_label + static_cast<int>(i) << "," << num(values[i]) << "\n";
}

void write_artifacts(const fs::path& dir, const RunConfig& cfg, const RunResult& r, const std::string& source) {
  write_series(dir / "profile.csv", "site,value", r.report.profile, 1);
  write_series(dir / "current.csv", "site,value", r.report.currents, r.report.current_first_label);
  write_series(dir / "schmidt.csv", "index,mu", r.schmidt, 1);

  nlohmann::json j;
  j["format_version"] = 1;
  j["source"] = source;
  j["n"] = cfg.model.n;
  j["model"] = std::string(to_string(cfg.model.kind));
  j["bath"] = std::string(to_string(cfg.bath.kind));
  j["quantity"] = cfg.model.kind == ModelKind::kTiltedIsing ? "energy" : "spin";
  j["j_mean"] = r.report.mean_current;
  j["current_spread"] = r.report.current_spread;
  j["drop"] = r.report.drop;
  j["gradient"] = r.report.gradient;
  j["kappa"] = r.report.kappa ? nlohmann::json(*r.report.kappa) : nlohmann::json(nullptr);
  j["ballistic"] = r.report.ballistic;
  j["skip_left"] = r.report.skip_left;
  j["skip_right"] = r.report.skip_right;
  j["osee_center"] = r.osee_center;
  j["converged"] = r.converged;
  j["t_final"] = r.t;
  j["D_final"] = r.d_final;
  j["exit_code"] = r.exit_code;
  j["config"] = to_text(cfg);
  std::ofstream out(dir / "summary.json");
  if (!out) throw std::runtime_error("cannot write summary.json");
  out << j.dump(2) << "\n";
}

void fill_from_state(RunResult& r, SuperketMps& state, const RunConfig& cfg) {
  r.report = transport_report(state, cfg.model_spec(), cfg.skips());
  r.d_final = state.max_bond_dim();
  if (state.size() > 1) {
    const SchmidtSpectrum spec = state.schmidt_spectrum(state.size() / 2 - 1);
    r.schmidt = spec.values;
    r.osee_center = osee(spec);
  }
}

void warn_singular_targets(const RunConfig& cfg, std::ostream& log) {
  const BathSpec bath = cfg.bath_spec();
  if (bath.kind != BathKind::kTwoSpin) return;
  const ModelSpec model = cfg.model_spec();
  for (ChainEnd end : {ChainEnd::kLeft, ChainEnd::kRight}) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(two_spin_target(bath, model, end), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-12) {
      log << "warning: " << (end == ChainEnd::kLeft ? "left" : "right")
          << " bath target has a zero eigenvalue; the steady state may relax slowly\n";
    }
  }
}

RunResult evolve_and_write(const RunConfig& cfg, SuperketMps& state, double t0, const fs::path& out_dir,
                           std::ostream& log) {
  RunResult result;
  const ModelSpec model = cfg.model_spec();
  const BathSpec bath = cfg.bath_spec();
  const LocalGenerators gens = assemble_local_liouvilleans(model, bath);
  const TrotterPlan plan = build_trotter_plan(gens, cfg.evolve.tau, cfg.evolve.order);
  const ConvergenceProbe probe = make_transport_probe(model, cfg.skips());
  const std::string cfg_text = to_text(cfg);
  const std::uint64_t digest = physics_digest(cfg);
  warn_singular_targets(cfg, log);

  std::ofstream diag(out_dir / "diagnostics.csv", std::ios::app);
  if (!diag) throw ConfigError("cannot write diagnostics.csv in " + out_dir.string());

  EvolveOptions opts = cfg.evolve_options();
  opts.t_start = t0;
  double next_ckpt = cfg.output.checkpoint_every > 0.0 ? t0 + cfg.output.checkpoint_every : INFINITY;
  opts.on_window = [&](const SuperketMps& s, const DiagnosticsRecord& rec) {
    diag << num(rec.t) << "," << rec.d_max << "," << num(rec.discarded_weight) << "," << num(rec.j_mean) << ","
         << num(rec.j_spread) << "," << num(rec.osee_center) << "\n";
    diag.flush();
    log << std::setprecision(6) << "t=" << rec.t << " D=" << rec.d_max << " j=" << rec.j_mean
        << " spread=" << rec.j_spread << " drift=" << rec.drift << " osee=" << rec.osee_center << "\n";
    if (rec.t >= next_ckpt - 1e-9) {
      save_checkpoint(out_dir / kCheckpointName, Checkpoint{rec.t, digest, cfg_text, s});
      while (next_ckpt <= rec.t + 1e-9) next_ckpt += cfg.output.checkpoint_every;
    }
    return true;
  };

  RunDiagnostics diagnostics;
  try {
    const EvolveResult er = evolve_to_ness(state, plan, probe, opts, diagnostics);
    result.converged = er.converged;
    result.t = er.t;
    result.exit_code = er.converged ? kConverged : kNotConverged;
  } catch (const StateCollapseError& e) {
    result.exit_code = kNumericalFailure;
    result.error = e.what();
    return result;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::runtime_error& e) {
    result.exit_code = kNumericalFailure;
    result.error = e.what();
    return result;
  }
  save_checkpoint(out_dir / kCheckpointName, Checkpoint{result.t, digest, cfg_text, state});
  fill_from_state(result, state, cfg);
  write_artifacts(out_dir, cfg, result, "mpo");
  return result;
}

}  // namespace

SuperketMps initial_state(const RunConfig& config) {
  const auto local = initial_local_coeffs(config);
  SuperketMps s = SuperketMps::product_state(local);
  s.set_dmax(config.evolve.dmax_init);
  return s;
}

RunResult run(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  ensure_dir(out_dir);
  {
    std::ofstream diag(out_dir / "diagnostics.csv", std::ios::trunc);
    diag << kDiagnosticsHeader;
  }
  SuperketMps state = initial_state(config);
  return evolve_and_write(config, state, 0.0, out_dir, log);
}

RunResult resume(const fs::path& checkpoint, const Overrides& overrides, bool force, const fs::path& out_dir,
                 std::ostream& log) {
  Checkpoint ck = load_checkpoint(checkpoint);
  RunConfig cfg = parse_config(ck.config_text, checkpoint.string() + "[config]");
  for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
  cfg.validate();
  if (physics_digest(cfg) != ck.digest && !force) {
    throw CheckpointError("model/bath settings differ from the checkpoint (digest mismatch); use --force to override");
  }
  if (ck.state.size() != cfg.model.n) throw CheckpointError("checkpoint chain length differs from model.n");
  ensure_dir(out_dir);
  if (!fs::exists(out_dir / "diagnostics.csv")) {
    std::ofstream diag(out_dir / "diagnostics.csv");
    diag << kDiagnosticsHeader;
  }
  ck.state.set_dmax(std::max(ck.state.dmax(), cfg.evolve.dmax_init));
  return evolve_and_write(cfg, ck.state, ck.t, out_dir, log);
}

RunResult observe(const fs::path& checkpoint, const fs::path& out_dir) {
  Checkpoint ck = load_checkpoint(checkpoint);
  const RunConfig cfg = parse_config(ck.config_text, checkpoint.string() + "[config]");
  cfg.validate();
  ensure_dir(out_dir);
  RunResult r;
  r.t = ck.t;
  fill_from_state(r, ck.state, cfg);
  // Convergence is re-judged from the stored state alone: only uniformity
  // can be checked without a second snapshot.
  r.converged = r.report.current_spread < cfg.convergence.tol_uniformity;
  r.exit_code = kConverged;
  write_artifacts(out_dir, cfg, r, "mpo");
  return r;
}

RunResult run_oracle(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  if (config.model.n > oracle::kMaxSites) {
    throw ConfigError("oracle supports n <= " + std::to_string(oracle::kMaxSites));
  }
  ensure_dir(out_dir);
  const ModelSpec model = config.model_spec();
  warn_singular_targets(config, log);
  const auto liou = oracle::dense_liouvillean(model, config.bath_spec());
  RunResult r;
  oracle::NessResult ness;
  try {
    ness = oracle::ness_nullspace(liou);
  } catch (const oracle::DegenerateNessError& e) {
    r.exit_code = kNumericalFailure;
    r.error = e.what();
    return r;
  }
  log << "oracle residual " << ness.residual << ", min eigenvalue " << ness.min_eigenvalue << "\n";
  if (ness.min_eigenvalue < oracle::kPositivityFloor) {
    r.exit_code = kNumericalFailure;
    r.error = "oracle: steady state is not positive (min eigenvalue " + std::to_string(ness.min_eigenvalue) + ")";
    return r;
  }
  const int n = model.n;
  const TransportSkips sk = config.skips();
  if (model.kind == ModelKind::kTiltedIsing) {
    const auto terms = build_bond_terms(model);
    r.report = fit_transport_coefficient(oracle::energy_density_profile(ness.coeffs, n, terms),
                                         oracle::energy_current_profile(ness.coeffs, n, model.hx), 2, n, sk.left,
                                         sk.right);
  } else {
    r.report = fit_transport_coefficient(oracle::spin_profile(ness.coeffs, n),
                                         oracle::spin_current_profile(ness.coeffs, n), 1, n, sk.left, sk.right);
  }
  if (n > 1) {
    r.schmidt = oracle::schmidt_values(ness.coeffs, n, n / 2 - 1);
    r.osee_center = osee(SchmidtSpectrum{n / 2 - 1, r.schmidt});
    r.d_final = static_cast<Eigen::Index>(r.schmidt.size());
  }
  r.converged = true;
  r.t = INFINITY;
  r.exit_code = kConverged;
  write_artifacts(out_dir, config, r, "oracle");
  return r;
}

CompareResult compare(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.model.n > 5) throw ConfigError("compare supports n <= 5");
  const ModelSpec model = config.model_spec();
  const BathSpec bath = config.bath_spec();
  const double t_target = config.evolve_options().criteria.t_max;
  const int steps = static_cast<int>(std::lround(t_target / config.evolve.tau));

  SuperketMps state = initial_state(config);
  const TrotterPlan plan = build_trotter_plan(assemble_local_liouvilleans(model, bath), config.evolve.tau,
                                              config.evolve.order);
  StepOptions so;
  so.dmax = config.evolve.dmax_cap;
  so.trunc_eps = config.evolve.trunc_eps;
  so.svd = config.evolve.svd;
  advance(state, plan, steps, so);

  const auto liou = oracle::dense_liouvillean(model, bath);
  const auto local = initial_local_coeffs(config);
  const RVector c = oracle::time_integrate(liou, oracle::product_coeffs(local), steps * config.evolve.tau);

  CompareResult out;
  out.t = steps * config.evolve.tau;
  auto dev = [](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  };
  const int n = model.n;
  const auto terms = build_bond_terms(model);
  out.deviation["spin_profile"] = dev(spin_profile(state), oracle::spin_profile(c, n));
  out.deviation["spin_current"] = dev(spin_current_profile(state), oracle::spin_current_profile(c, n));
  out.deviation["energy_density"] = dev(energy_density_profile(state, terms), oracle::energy_density_profile(c, n, terms));
  if (model.kind == ModelKind::kTiltedIsing) {
    out.deviation["energy_current"] =
        dev(energy_current_profile(state, model.hx), oracle::energy_current_profile(c, n, model.hx));
  }
  for (const auto& [name, d] : out.deviation) {
    out.max_deviation = std::max(out.max_deviation, d);
    log << name << " max |mpo - oracle| = " << d << "\n";
  }
  return out;
}

int sweep(const RunConfig& base, const std::vector<int>& sizes, int jobs, const fs::path& out_dir, std::ostream& log) {
  if (sizes.empty()) throw ConfigError("sweep needs at least one size");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw ConfigError("sweep sizes must be ascending");
  ensure_dir(out_dir);
  jobs = std::max(1, jobs);

  struct Member {
    int n;
    RunResult result;
    std::string log;
  };
  auto run_member = [&base, &out_dir](int n) {
    Member m{n, {}, {}};
    std::ostringstream os;
    try {
      RunConfig cfg = base;
      cfg.model.n = n;
      cfg.output.dir = (out_dir / ("n" + std::to_string(n))).string();
      m.result = run(cfg, cfg.output.dir, os);
    } catch (const std::exception& e) {
      m.result.exit_code = kUsageError;
      m.result.error = e.what();
    }
    m.log = os.str();
    return m;
  };

  std::vector<Member> members;
  std::deque<std::future<Member>> pending;
  auto collect = [&] {
    Member m = pending.front().get();
    pending.pop_front();
    log << "[n=" << m.n << "]\n" << m.log;
    if (!m.result.error.empty()) log << "[n=" << m.n << "] error: " << m.result.error << "\n";
    members.push_back(std::move(m));
  };
  for (int n : sizes) {
    if (static_cast<int>(pending.size()) >= jobs) collect();
    pending.push_back(std::async(std::launch::async, run_member, n));
  }
  while (!pending.empty()) collect();
  std::sort(members.begin(), members.end(), [](const Member& a, const Member& b) { return a.n < b.n; });

  std::ofstream agg(out_dir / "aggregate.csv");
  agg << "n,n_eff,j_mean,drop,gradient,kappa,ballistic,converged,t_final,D_final,exit_code\n";
  int worst = kConverged;
  for (const Member& m : members) {
    const auto& r = m.result;
    const int n_eff = m.n - r.report.skip_left - r.report.skip_right;
    agg << m.n << "," << n_eff << "," << num(r.report.mean_current) << "," << num(r.report.drop) << ","
        << num(r.report.gradient) << "," << (r.report.kappa ? num(*r.report.kappa) : "") << ","
        << (r.report.ballistic ? 1 : 0) << "," << (r.converged ? 1 : 0) << "," << num(r.t) << "," << r.d_final << ","
        << r.exit_code << "\n";
    worst = std::max(worst, r.exit_code);
  }
  return worst;
}

}  // namespace nessmpo::runner
