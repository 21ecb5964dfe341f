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

#include "nessmpo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

namespace nessmpo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

double parse_double(std::string_view v) {
  v = trim(v);
  const std::string l = lower(v);
  if (l == "inf" || l == "infinity") return INFINITY;
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("expected a number, got '" + std::string(v) + "'");
  return out;
}

int parse_int(std::string_view v) {
  v = trim(v);
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("expected an integer, got '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view v) {
  const std::string l = lower(trim(v));
  if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
  if (l == "false" || l == "no" || l == "off" || l == "0") return false;
  throw ConfigError("expected a boolean, got '" + std::string(v) + "'");
}

std::vector<double> parse_list(std::string_view v) {
  std::vector<double> out;
  v = trim(v);
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = v.find(',', start);
    out.push_back(parse_double(v.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

const std::vector<Key>& keys() {
  using C = RunConfig;
  using V = std::string_view;
  using S = std::optional<std::string>;
  static const std::vector<Key> table = {
      {"model.kind", [](C& c, V v) { c.model.kind = parse_model_kind(trim(v)); },
       [](const C& c) -> S { return std::string(to_string(c.model.kind)); }},
      {"model.n", [](C& c, V v) { c.model.n = parse_int(v); }, [](const C& c) -> S { return std::to_string(c.model.n); }},
      {"model.delta", [](C& c, V v) { c.model.delta = parse_double(v); },
       [](const C& c) -> S { return fmt(c.model.delta); }},
      {"model.field_pattern",
       [](C& c, V v) {
         const std::string p = lower(trim(v));
         if (p != "uniform" && p != "staggered" && p != "explicit") {
           throw ConfigError("field_pattern must be uniform, staggered or explicit");
         }
         c.model.field_pattern = p;
       },
       [](const C& c) -> S { return c.model.field_pattern; }},
      {"model.field_values", [](C& c, V v) { c.model.field_values = parse_list(v); },
       [](const C& c) -> S { return fmt_list(c.model.field_values); }},
      {"model.hx", [](C& c, V v) { c.model.hx = parse_double(v); }, [](const C& c) -> S { return fmt(c.model.hx); }},
      {"model.hz", [](C& c, V v) { c.model.hz = parse_double(v); }, [](const C& c) -> S { return fmt(c.model.hz); }},

      {"bath.kind", [](C& c, V v) { c.bath.kind = parse_bath_kind(trim(v)); },
       [](const C& c) -> S { return std::string(to_string(c.bath.kind)); }},
      {"bath.gamma", [](C& c, V v) { c.bath.gamma = parse_double(v); },
       [](const C& c) -> S { return fmt(c.bath_spec().gamma); }},
      {"bath.mu_left", [](C& c, V v) { c.bath.mu_left = parse_double(v); },
       [](const C& c) -> S { return fmt(c.bath.mu_left); }},
      {"bath.mu_right", [](C& c, V v) { c.bath.mu_right = parse_double(v); },
       [](const C& c) -> S { return fmt(c.bath.mu_right); }},
      {"bath.t_left", [](C& c, V v) { c.bath.t_left = parse_double(v); },
       [](const C& c) -> S { return fmt(c.bath.t_left); }},
      {"bath.t_right", [](C& c, V v) { c.bath.t_right = parse_double(v); },
       [](const C& c) -> S { return fmt(c.bath.t_right); }},
      {"bath.target_left", [](C& c, V v) { c.bath.target_left = parse_list(v); },
       [](const C& c) -> S {
         if (c.bath.target_left.empty()) return std::nullopt;
         return fmt_list(c.bath.target_left);
       }},
      {"bath.target_right", [](C& c, V v) { c.bath.target_right = parse_list(v); },
       [](const C& c) -> S {
         if (c.bath.target_right.empty()) return std::nullopt;
         return fmt_list(c.bath.target_right);
       }},

      {"evolve.tau", [](C& c, V v) { c.evolve.tau = parse_double(v); },
       [](const C& c) -> S { return fmt(c.evolve.tau); }},
      {"evolve.order", [](C& c, V v) { c.evolve.order = parse_int(v); },
       [](const C& c) -> S { return std::to_string(c.evolve.order); }},
      {"evolve.t_max", [](C& c, V v) { c.evolve.t_max = parse_double(v); },
       [](const C& c) -> S { return fmt(c.evolve_options().criteria.t_max); }},
      {"evolve.dmax_init", [](C& c, V v) { c.evolve.dmax_init = parse_int(v); },
       [](const C& c) -> S { return std::to_string(c.evolve.dmax_init); }},
      {"evolve.dmax_cap", [](C& c, V v) { c.evolve.dmax_cap = parse_int(v); },
       [](const C& c) -> S { return std::to_string(c.evolve.dmax_cap); }},
      {"evolve.dmax_increment", [](C& c, V v) { c.evolve.dmax_increment = parse_int(v); },
       [](const C& c) -> S { return std::to_string(c.evolve.dmax_increment); }},
      {"evolve.grow_threshold", [](C& c, V v) { c.evolve.grow_threshold = parse_double(v); },
       [](const C& c) -> S { return fmt(c.evolve.grow_threshold); }},
      {"evolve.trunc_eps", [](C& c, V v) { c.evolve.trunc_eps = parse_double(v); },
       [](const C& c) -> S { return fmt(c.evolve.trunc_eps); }},
      {"evolve.svd",
       [](C& c, V v) {
         const std::string s = lower(trim(v));
         if (s == "auto") {
           c.evolve.svd = SvdMethod::kAuto;
         } else if (s == "exact") {
           c.evolve.svd = SvdMethod::kExact;
         } else if (s == "randomized") {
           c.evolve.svd = SvdMethod::kRandomized;
         } else {
           throw ConfigError("svd must be auto, exact or randomized");
         }
       },
       [](const C& c) -> S {
         switch (c.evolve.svd) {
           case SvdMethod::kExact: return "exact";
           case SvdMethod::kRandomized: return "randomized";
           default: return "auto";
         }
       }},
      {"evolve.parallel_bonds", [](C& c, V v) { c.evolve.parallel_bonds = parse_bool(v); },
       [](const C& c) -> S { return c.evolve.parallel_bonds ? "true" : "false"; }},
      {"evolve.threads", [](C& c, V v) { c.evolve.threads = parse_int(v); },
       [](const C& c) -> S { return std::to_string(c.evolve.threads); }},
      {"evolve.initial",
       [](C& c, V v) {
         const std::string s = lower(trim(v));
         if (s == "mixed") {
           c.evolve.initial = InitialState::kMixed;
         } else if (s == "linear") {
           c.evolve.initial = InitialState::kLinear;
         } else {
           throw ConfigError("initial must be mixed or linear");
         }
       },
       [](const C& c) -> S { return c.evolve.initial == InitialState::kMixed ? "mixed" : "linear"; }},

      {"convergence.tol_uniformity", [](C& c, V v) { c.convergence.tol_uniformity = parse_double(v); },
       [](const C& c) -> S { return fmt(c.convergence.tol_uniformity); }},
      {"convergence.tol_drift", [](C& c, V v) { c.convergence.tol_drift = parse_double(v); },
       [](const C& c) -> S { return fmt(c.convergence.tol_drift); }},
      {"convergence.window", [](C& c, V v) { c.convergence.window = parse_double(v); },
       [](const C& c) -> S { return fmt(c.convergence.window); }},
      {"convergence.zero_current_floor", [](C& c, V v) { c.convergence.zero_current_floor = parse_double(v); },
       [](const C& c) -> S { return fmt(c.convergence.zero_current_floor); }},

      {"observe.skip_left", [](C& c, V v) { c.observe.skip_left = parse_int(v); },
       [](const C& c) -> S {
         if (!c.observe.skip_left) return std::nullopt;
         return std::to_string(*c.observe.skip_left);
       }},
      {"observe.skip_right", [](C& c, V v) { c.observe.skip_right = parse_int(v); },
       [](const C& c) -> S {
         if (!c.observe.skip_right) return std::nullopt;
         return std::to_string(*c.observe.skip_right);
       }},
      {"observe.energy_bond_endpoints",
       [](C& c, V v) {
         const auto l = parse_list(v);
         if (l.size() != 2 || l[0] != std::floor(l[0]) || l[1] != std::floor(l[1])) {
           throw ConfigError("energy_bond_endpoints expects two integers");
         }
         c.observe.energy_bond_endpoints = std::make_pair(static_cast<int>(l[0]), static_cast<int>(l[1]));
       },
       [](const C& c) -> S {
         if (!c.observe.energy_bond_endpoints) return std::nullopt;
         return std::to_string(c.observe.energy_bond_endpoints->first) + ", " +
                std::to_string(c.observe.energy_bond_endpoints->second);
       }},

      {"output.dir", [](C& c, V v) { c.output.dir = std::string(trim(v)); },
       [](const C& c) -> S { return c.output.dir; }},
      {"output.checkpoint_every", [](C& c, V v) { c.output.checkpoint_every = parse_double(v); },
       [](const C& c) -> S { return fmt(c.output.checkpoint_every); }},
  };
  return table;
}

const Key* find_key(std::string_view dotted) {
  const std::string k = lower(trim(dotted));
  for (const Key& key : keys()) {
    if (k == key.name) return &key;
  }
  return nullptr;
}

CMatrix target_matrix(const std::vector<double>& v, const char* which) {
  CMatrix m(4, 4);
  if (v.size() == 16) {
    for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = v[static_cast<std::size_t>(i)];
  } else if (v.size() == 32) {
    for (int i = 0; i < 16; ++i) {
      m(i / 4, i % 4) = Complex(v[static_cast<std::size_t>(2 * i)], v[static_cast<std::size_t>(2 * i + 1)]);
    }
  } else {
    throw ConfigError(std::string("bath.") + which + " needs 16 real or 32 (re, im) numbers");
  }
  return m;
}

}  // namespace

ModelSpec RunConfig::model_spec() const {
  ModelSpec s;
  s.kind = model.kind;
  s.n = model.n;
  s.delta = model.delta;
  s.hx = model.hx;
  s.hz = model.hz;
  const auto& v = model.field_values;
  if (model.field_pattern == "uniform") {
    if (v.size() > 1) throw ConfigError("uniform field pattern takes at most one value");
    if (!v.empty() && v[0] != 0.0) s.fields.assign(static_cast<std::size_t>(std::max(0, model.n)), v[0]);
  } else if (model.field_pattern == "staggered") {
    if (v.size() != 2) throw ConfigError("staggered field pattern takes two values (odd sites, even sites)");
    s.fields = staggered_fields(model.n, v[0], v[1]);
  } else {
    if (static_cast<int>(v.size()) != model.n) {
      throw ConfigError("explicit field pattern needs " + std::to_string(model.n) + " values, got " +
                        std::to_string(v.size()));
    }
    s.fields = v;
  }
  return s;
}

BathSpec RunConfig::bath_spec() const {
  BathSpec b;
  b.kind = bath.kind;
  b.gamma = bath.gamma ? *bath.gamma : (bath.kind == BathKind::kSingleSpin ? 1.0 : 2.0);
  b.mu_left = bath.mu_left;
  b.mu_right = bath.mu_right;
  b.t_left = bath.t_left;
  b.t_right = bath.t_right;
  if (!bath.target_left.empty()) b.target_left = target_matrix(bath.target_left, "target_left");
  if (!bath.target_right.empty()) b.target_right = target_matrix(bath.target_right, "target_right");
  return b;
}

TransportSkips RunConfig::skips() const {
  const ModelSpec m = model_spec();
  TransportSkips s = default_skips(m);
  if (m.kind == ModelKind::kTiltedIsing && observe.energy_bond_endpoints) {
    s.left = observe.energy_bond_endpoints->first - 1;
    s.right = observe.energy_bond_endpoints->second;
  }
  if (observe.skip_left) s.left = *observe.skip_left;
  if (observe.skip_right) s.right = *observe.skip_right;
  return s;
}

EvolveOptions RunConfig::evolve_options() const {
  EvolveOptions o;
  o.criteria.tol_uniformity = convergence.tol_uniformity;
  o.criteria.tol_drift = convergence.tol_drift;
  o.criteria.window = convergence.window;
  o.criteria.zero_current_floor = convergence.zero_current_floor;
  o.criteria.t_max = evolve.t_max > 0.0 ? evolve.t_max : 20.0 * model.n;
  o.dmax.dmax_init = evolve.dmax_init;
  o.dmax.dmax_cap = evolve.dmax_cap;
  o.dmax.increment = evolve.dmax_increment;
  o.dmax.grow_threshold = evolve.grow_threshold;
  o.trunc_eps = evolve.trunc_eps;
  o.svd = evolve.svd;
  o.parallel_bonds = evolve.parallel_bonds;
  o.threads = evolve.threads;
  return o;
}

void RunConfig::validate() const {
  try {
    const ModelSpec m = model_spec();
    m.validate();
    const BathSpec b = bath_spec();
    b.validate();
    if (b.kind == BathKind::kTwoSpin && m.n < 4) throw ConfigError("two-spin baths need model.n >= 4");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(evolve.tau > 0.0)) throw ConfigError("evolve.tau must be > 0");
  if (evolve.order != 2 && evolve.order != 4) throw ConfigError("evolve.order must be 2 or 4");
  if (evolve.t_max < 0.0) throw ConfigError("evolve.t_max must be >= 0");
  if (evolve.dmax_init < 1) throw ConfigError("evolve.dmax_init must be >= 1");
  if (evolve.dmax_cap < evolve.dmax_init) throw ConfigError("evolve.dmax_cap must be >= evolve.dmax_init");
  if (evolve.dmax_increment < 0) throw ConfigError("evolve.dmax_increment must be >= 0");
  if (!(evolve.trunc_eps >= 0.0)) throw ConfigError("evolve.trunc_eps must be >= 0");
  if (evolve.threads < 1) throw ConfigError("evolve.threads must be >= 1");
  if (!(convergence.window > 0.0)) throw ConfigError("convergence.window must be > 0");
  if (!(convergence.tol_uniformity > 0.0) || !(convergence.tol_drift > 0.0)) {
    throw ConfigError("convergence tolerances must be > 0");
  }
  const TransportSkips s = skips();
  if (s.left < 0 || s.right < 0 || 2 * s.left >= model.n || 2 * s.right >= model.n ||
      model.n - s.left - s.right < 2) {
    throw ConfigError("observe skips (" + std::to_string(s.left) + ", " + std::to_string(s.right) +
                      ") leave too few sites for n = " + std::to_string(model.n));
  }
  if (output.checkpoint_every < 0.0) throw ConfigError("output.checkpoint_every must be >= 0");
  if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const Key* k = find_key(key);
  if (!k) throw ConfigError("unknown key '" + std::string(trim(key)) + "'");
  try {
    k->set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(k->name) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(k->name) + ": " + e.what());
  }
}

RunConfig parse_config(std::string_view text, const std::string& source) {
  RunConfig config;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    try {
      set_config_value(config, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void apply_env_overrides(RunConfig& config, char** envp) {
  if (!envp) return;
  for (char** e = envp; *e; ++e) {
    const std::string_view entry(*e);
    if (entry.rfind("NESS_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key = lower(entry.substr(5, eq - 5));
    const auto sep = key.find("__");
    if (sep == std::string::npos) continue;
    key.replace(sep, 2, ".");
    try {
      set_config_value(config, key, entry.substr(eq + 1));
    } catch (const ConfigError& err) {
      throw ConfigError("environment " + std::string(entry.substr(0, eq)) + ": " + err.what());
    }
  }
}

std::string to_text(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const Key& k : keys()) {
    const std::string_view name(k.name);
    const auto dot = name.find('.');
    const std::string sec(name.substr(0, dot));
    const auto value = k.get(config);
    if (!value) continue;
    if (sec != section) {
      if (!out.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += std::string(name.substr(dot + 1)) + " = " + *value + "\n";
  }
  return out;
}

std::uint64_t physics_digest(const RunConfig& config) {
  std::string text;
  for (const Key& k : keys()) {
    const std::string_view name(k.name);
    if (name.rfind("model.", 0) != 0 && name.rfind("bath.", 0) != 0) continue;
    const auto value = k.get(config);
    if (value) text += std::string(name) + "=" + *value + "\n";
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace nessmpo
