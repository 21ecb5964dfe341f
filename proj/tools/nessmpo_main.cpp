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

#include <unistd.h>

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nessmpo/checkpoint.hpp"
#include "nessmpo/config.hpp"
#include "nessmpo/runner.hpp"

namespace fs = std::filesystem;
using namespace nessmpo;

namespace {

runner::Overrides split_overrides(const std::vector<std::string>& sets) {
  runner::Overrides out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

RunConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg = load_config(path);
  apply_env_overrides(cfg, environ);
  for (const auto& [k, v] : split_overrides(sets)) set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

int report(const runner::RunResult& r, const fs::path& out) {
  if (!r.error.empty()) {
    std::cerr << "error: " << r.error << "\n";
    return r.exit_code;
  }
  std::cout << (r.converged ? "converged" : "not converged") << " at t=" << r.t << ", j=" << r.report.mean_current;
  if (r.report.kappa) {
    std::cout << ", kappa=" << *r.report.kappa;
  } else if (r.report.ballistic) {
    std::cout << ", ballistic";
  }
  std::cout << "\nartifacts in " << out.string() << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-driven spin chain steady states with matrix-product superkets"};
  app.require_subcommand(1);
  std::string out_dir;
  int jobs = 1;
  std::vector<std::string> sets;
  app.add_option("--out", out_dir, "Output directory (default: output.dir of the config)");
  app.add_option("--jobs", jobs, "Concurrent sweep members")->check(CLI::PositiveNumber);

  std::string cfg_path, ckpt_path, sizes_text;
  bool force = false;

  auto* run = app.add_subcommand("run", "Evolve to the steady state");
  run->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", sets, "Override key=value");

  auto* resume = app.add_subcommand("resume", "Continue from a checkpoint");
  resume->add_option("checkpoint", ckpt_path, "Checkpoint file")->required()->check(CLI::ExistingFile);
  resume->add_option("--set", sets, "Override key=value");
  resume->add_flag("--force", force, "Accept a model/bath digest mismatch");

  auto* observe = app.add_subcommand("observe", "Write observables of a checkpoint");
  observe->add_option("checkpoint", ckpt_path, "Checkpoint file")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle", "Dense steady state for small chains");
  oracle->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--set", sets, "Override key=value");

  auto* compare = app.add_subcommand("compare", "MPO evolution against dense integration");
  compare->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  compare->add_option("--set", sets, "Override key=value");

  auto* sweep = app.add_subcommand("sweep", "Run a series of chain lengths");
  sweep->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--sizes", sizes_text, "Comma-separated ascending chain lengths")->required();
  sweep->add_option("--set", sets, "Override key=value");

  for (auto* sub : {run, resume, observe, oracle, compare, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : runner::kUsageError;
  }

  try {
    if (*run) {
      const RunConfig cfg = load_with_overrides(cfg_path, sets);
      const fs::path out = out_dir.empty() ? fs::path(cfg.output.dir) : fs::path(out_dir);
      return report(runner::run(cfg, out, std::cerr), out);
    }
    if (*resume) {
      const fs::path out = out_dir.empty() ? fs::path(ckpt_path).parent_path() : fs::path(out_dir);
      return report(runner::resume(ckpt_path, split_overrides(sets), force, out.empty() ? "." : out, std::cerr), out);
    }
    if (*observe) {
      const fs::path out = out_dir.empty() ? fs::path(ckpt_path).parent_path() : fs::path(out_dir);
      return report(runner::observe(ckpt_path, out.empty() ? "." : out), out);
    }
    if (*oracle) {
      const RunConfig cfg = load_with_overrides(cfg_path, sets);
      const fs::path out = out_dir.empty() ? fs::path(cfg.output.dir) : fs::path(out_dir);
      return report(runner::run_oracle(cfg, out, std::cerr), out);
    }
    if (*compare) {
      const RunConfig cfg = load_with_overrides(cfg_path, sets);
      const auto res = runner::compare(cfg, std::cout);
      std::cout << "t=" << res.t << " max deviation " << res.max_deviation << "\n";
      return runner::kConverged;
    }
    if (*sweep) {
      const RunConfig cfg = load_with_overrides(cfg_path, sets);
      std::vector<int> sizes;
      std::size_t start = 0;
      while (start <= sizes_text.size()) {
        const auto comma = sizes_text.find(',', start);
        const std::string item = sizes_text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
          sizes.push_back(std::stoi(item));
        } catch (const std::exception&) {
          throw ConfigError("--sizes: '" + item + "' is not an integer");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      const fs::path out = out_dir.empty() ? fs::path(cfg.output.dir) : fs::path(out_dir);
      const int code = runner::sweep(cfg, sizes, jobs, out, std::cerr);
      std::cout << "aggregate table in " << (out / "aggregate.csv").string() << "\n";
      return code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return runner::kUsageError;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return runner::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runner::kNumericalFailure;
  }
  return runner::kUsageError;
}
