// Copyright 2026 The qfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qfc/errors.hpp"
#include "qfc/harness.hpp"

namespace qfc::harness {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& s, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(line, "not a number: '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, int line) {
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(line, "not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, int line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(line, "not a boolean: '" + s + "'");
}

std::filesystem::path resolve(const std::string& v, const std::filesystem::path& base) {
  std::filesystem::path p(v);
  return (p.is_relative() && !base.empty()) ? base / p : p;
}

}  // namespace

SweepConfig SweepConfig::full() { return SweepConfig{}; }

SweepConfig SweepConfig::desk_scale() {
  SweepConfig c;
  c.apply_desk_scale();
  return c;
}

void SweepConfig::apply_desk_scale() {
  alphas = {0.0, 0.2, 0.4, 0.6};
  epsilons = {0.1, 0.2};
  episodes = 200;
}

void SweepConfig::validate() const {
  if (noises.empty()) throw ConfigError("sweep: empty noise list");
  if (alphas.empty()) throw ConfigError("sweep: empty alpha grid");
  if (epsilons.empty()) throw ConfigError("sweep: empty epsilon grid");
  if (scenarios.empty()) throw ConfigError("sweep: empty scenario list");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("sweep: alpha outside [0, 1]");
  }
  for (double e : epsilons) {
    if (!(e >= 0.0 && e <= kMaxEpsilon)) throw ConfigError("sweep: epsilon outside [0, 0.3]");
  }
  std::set<std::string> seen;
  for (const auto& s : scenarios) {
    if (std::find(kScenarioNames.begin(), kScenarioNames.end(), s) == kScenarioNames.end()) {
      throw ConfigError("sweep: unknown scenario '" + s + "'");
    }
    if (!seen.insert(s).second) throw ConfigError("sweep: duplicate scenario '" + s + "'");
  }
  if (episodes < 1) throw ConfigError("sweep: episodes must be at least 1");
  if (horizon < 1) throw ConfigError("sweep: horizon must be at least 1");
  if (!(f_star >= 0.0 && f_star <= 1.0)) throw ConfigError("sweep: f_star outside [0, 1]");
  if (train_timesteps < 0) throw ConfigError("sweep: negative train_timesteps");
}

SweepConfig parse_sweep_config(const std::string& text, const std::filesystem::path& base_dir) {
  SweepConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  std::set<std::string> assigned;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "sweep" && section != "paths" && section != "training") {
        fail(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) fail(line, "key '" + key + "' outside a section");
    const std::string qualified = section + "." + key;
    if (!assigned.insert(qualified).second) fail(line, "duplicate key '" + qualified + "'");

    if (qualified == "sweep.noises") {
      cfg.noises.clear();
      for (const auto& n : split_list(value)) {
        try {
          cfg.noises.push_back(parse_noise_kind(n));
        } catch (const Error&) {
          fail(line, "unknown noise kind '" + n + "'");
        }
      }
    } else if (qualified == "sweep.alphas") {
      cfg.alphas.clear();
      for (const auto& v : split_list(value)) cfg.alphas.push_back(parse_real(v, line));
    } else if (qualified == "sweep.epsilons") {
      cfg.epsilons.clear();
      for (const auto& v : split_list(value)) cfg.epsilons.push_back(parse_real(v, line));
    } else if (qualified == "sweep.scenarios") {
      cfg.scenarios = split_list(value);
    } else if (qualified == "sweep.episodes") {
      cfg.episodes = parse_int<int>(value, line);
    } else if (qualified == "sweep.horizon") {
      cfg.horizon = parse_int<int>(value, line);
    } else if (qualified == "sweep.master_seed") {
      cfg.master_seed = parse_int<std::uint64_t>(value, line);
    } else if (qualified == "sweep.f_star") {
      cfg.f_star = parse_real(value, line);
    } else if (qualified == "paths.out_dir") {
      cfg.out_dir = resolve(value, base_dir);
    } else if (qualified == "paths.checkpoint_dir") {
      cfg.checkpoint_dir = resolve(value, base_dir);
    } else if (qualified == "training.train_on_demand") {
      cfg.train_on_demand = parse_bool(value, line);
    } else if (qualified == "training.timesteps") {
      cfg.train_timesteps = parse_int<long>(value, line);
    } else {
      fail(line, "unknown key '" + qualified + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str(), path.parent_path());
}

}  // namespace qfc::harness
