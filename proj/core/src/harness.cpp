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

#include "qfc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "qfc/errors.hpp"
#include "qfc/parallel.hpp"
#include "qfc/rl/checkpoint.hpp"
#include "qfc/rl/train.hpp"

namespace qfc::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool same_real(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

struct CellSpec {
  std::string scenario;
  NoiseKind noise;
  double alpha;
  double epsilon;
};

EnvConfig cell_env(const SweepConfig& cfg, const CellSpec& c) {
  EnvConfig env;
  env.noise = c.noise;
  env.alpha = c.alpha;
  env.epsilon = c.epsilon;
  env.horizon = cfg.horizon;
  return env;
}

std::filesystem::path cell_file(const SweepConfig& cfg, const CellSpec& c) {
  return cfg.out_dir / "cells" /
         (c.scenario + "_" + to_string(c.noise) + "_a" + fmt17(c.alpha) + "_e" +
          fmt17(c.epsilon) + ".cell");
}

void write_cell_file(const std::filesystem::path& path, const CellResult& r) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << results_csv_header() << '\n' << results_csv_row(r) << '\n' << "curve";
    for (double v : r.mean_curve) out << ',' << fmt17(v);
    out << '\n';
    if (!out) throw IoError("failed while writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<CellResult> read_cell_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string header, row, curve;
  if (!std::getline(in, header) || header != results_csv_header()) return std::nullopt;
  if (!std::getline(in, row) || !std::getline(in, curve)) return std::nullopt;
  try {
    CellResult r = parse_results_csv_row(row);
    std::stringstream ss(curve);
    std::string item;
    if (!std::getline(ss, item, ',') || item != "curve") return std::nullopt;
    while (std::getline(ss, item, ',')) r.mean_curve.push_back(std::stod(item));
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string describe(const CellSpec& c) {
  return "scenario=" + c.scenario + " noise=" + to_string(c.noise) + " alpha=" + fmt17(c.alpha) +
         " epsilon=" + fmt17(c.epsilon);
}

}  // namespace

bool CellResult::operator==(const CellResult& o) const {
  if (scenario != o.scenario || noise != o.noise || !same_real(alpha, o.alpha) ||
      !same_real(epsilon, o.epsilon) || seed != o.seed || episodes != o.episodes ||
      aborted != o.aborted || !same_real(mean_fidelity, o.mean_fidelity) ||
      !same_real(std_fidelity, o.std_fidelity) ||
      !same_real(mean_steps_to_threshold, o.mean_steps_to_threshold) ||
      !same_real(std_steps_to_threshold, o.std_steps_to_threshold) ||
      unreached_count != o.unreached_count || mean_curve.size() != o.mean_curve.size()) {
    return false;
  }
  for (std::size_t i = 0; i < mean_curve.size(); ++i) {
    if (!same_real(mean_curve[i], o.mean_curve[i])) return false;
  }
  return true;
}

void steps_to_threshold(CellResult& cell, double f_star) {
  double sum = 0.0;
  std::vector<double> reached;
  int unreached = 0;
  for (const auto& curve : cell.episode_curves) {
    int first = -1;
    for (std::size_t t = 0; t < curve.size(); ++t) {
      if (curve[t] >= f_star) {
        first = static_cast<int>(t);
        break;
      }
    }
    if (first < 0) {
      ++unreached;
    } else {
      reached.push_back(first);
      sum += first;
    }
  }
  cell.unreached_count = unreached;
  if (reached.empty()) {
    cell.mean_steps_to_threshold = kNaN;
    cell.std_steps_to_threshold = kNaN;
    return;
  }
  const double mean = sum / static_cast<double>(reached.size());
  double ss = 0.0;
  for (double s : reached) ss += (s - mean) * (s - mean);
  cell.mean_steps_to_threshold = mean;
  cell.std_steps_to_threshold = std::sqrt(ss / static_cast<double>(reached.size()));
}

CellResult evaluate(const Policy& policy, const EnvConfig& env_cfg, int n, std::uint64_t seed,
                    double f_star) {
  if (n < 1) throw ParameterError("evaluate: need at least one episode");
  env_cfg.validate();
  const SystemModel model(env_cfg);
  const ObservationMode mode = default_observation_mode(policy);

  CellResult cell;
  cell.scenario = policy.name();
  cell.noise = env_cfg.noise;
  cell.alpha = env_cfg.alpha;
  cell.epsilon = env_cfg.epsilon;
  cell.seed = seed;
  cell.episodes = n;

  std::vector<double> finals;
  finals.reserve(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    RngStream rng(seed, static_cast<std::uint64_t>(e));
    try {
      const EpisodeTrace trace = run_episode(policy, model, rng, mode);
      finals.push_back(trace.terminal_fidelity);
      cell.episode_curves.push_back(trace.fidelity_curve());
    } catch (const FilterDivergence&) {
      ++cell.aborted;
    }
  }
  if (finals.empty()) {
    cell.mean_fidelity = kNaN;
    cell.std_fidelity = kNaN;
  } else {
    double sum = 0.0;
    for (double f : finals) sum += f;
    const double mean = sum / static_cast<double>(finals.size());
    double ss = 0.0;
    for (double f : finals) ss += (f - mean) * (f - mean);
    cell.mean_fidelity = mean;
    cell.std_fidelity = std::sqrt(ss / static_cast<double>(finals.size()));
  }
  const std::size_t len = static_cast<std::size_t>(env_cfg.horizon) + 1;
  cell.mean_curve.assign(len, cell.episode_curves.empty() ? kNaN : 0.0);
  for (const auto& c : cell.episode_curves) {
    for (std::size_t t = 0; t < len; ++t) cell.mean_curve[t] += c[t];
  }
  if (!cell.episode_curves.empty()) {
    for (double& v : cell.mean_curve) v /= static_cast<double>(cell.episode_curves.size());
  }
  steps_to_threshold(cell, f_star);
  return cell;
}

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& scenario, NoiseKind noise,
                        double alpha, double epsilon) {
  const std::string key =
      scenario + "|" + to_string(noise) + "|" + fmt17(alpha) + "|" + fmt17(epsilon);
  return mix64(master_seed ^ fnv1a64(key));
}

std::string checkpoint_name(const std::string& scenario, NoiseKind noise, double alpha,
                            double epsilon) {
  char eps[32];
  std::snprintf(eps, sizeof eps, "%g", epsilon);
  if (scenario == "dbs") {
    char a[32];
    std::snprintf(a, sizeof a, "%g", alpha);
    return "dbs_" + to_string(noise) + "_a" + a + "_eps" + eps + ".ckpt";
  }
  return scenario + "_eps" + eps + ".ckpt";
}

std::vector<CellResult> sweep(const SweepConfig& cfg, const SweepOptions& opts) {
  cfg.validate();
  auto log = [&opts](const std::string& msg) {
    if (opts.log) opts.log(msg);
  };

  std::vector<CellSpec> specs;
  for (const auto& s : cfg.scenarios) {
    for (NoiseKind n : cfg.noises) {
      for (double e : cfg.epsilons) {
        for (double a : cfg.alphas) specs.push_back({s, n, a, e});
      }
    }
  }

  std::vector<std::optional<CellResult>> results(specs.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const CellSpec& c = specs[i];
    if (opts.resume) {
      auto cached = read_cell_file(cell_file(cfg, c));
      const std::uint64_t seed = cell_seed(cfg.master_seed, c.scenario, c.noise, c.alpha, c.epsilon);
      if (cached && cached->seed == seed && cached->episodes == cfg.episodes &&
          cached->scenario == c.scenario && cached->noise == c.noise &&
          cached->mean_curve.size() == static_cast<std::size_t>(cfg.horizon) + 1) {
        results[i] = std::move(*cached);
        continue;
      }
    }
    todo.push_back(i);
  }
  if (opts.resume) {
    log("resume: " + std::to_string(specs.size() - todo.size()) + " of " +
        std::to_string(specs.size()) + " cells already complete");
  }

  // Load or train every agent the remaining cells need, serially.
  std::map<std::string, Policy> agents;
  for (std::size_t i : todo) {
    const CellSpec& c = specs[i];
    if (c.scenario == "basic") continue;
    const std::string name = checkpoint_name(c.scenario, c.noise, c.alpha, c.epsilon);
    if (agents.count(name)) continue;
    const std::filesystem::path path = cfg.checkpoint_dir / name;
    if (!std::filesystem::exists(path)) {
      if (!cfg.train_on_demand) {
        throw MissingCheckpoint("cell " + describe(c) + ": checkpoint " + path.string() +
                                " not found (run `qfc train` for it or set train_on_demand)");
      }
      const rl::Scenario scenario = rl::parse_scenario(c.scenario);
      EnvConfig env = cell_env(cfg, c);
      if (scenario != rl::Scenario::kDbs) env.alpha = 0.0;
      rl::PpoConfig ppo = rl::PpoConfig::defaults_for(scenario);
      ppo.total_timesteps = cfg.train_timesteps;
      const std::uint64_t seed = mix64(cfg.master_seed ^ fnv1a64("train|" + name));
      log("training " + name);
      rl::TrainResult tr = rl::train(scenario, env, ppo, seed);
      rl::save_checkpoint(path, scenario, *tr.model,
                          {{"seed", std::to_string(seed)},
                           {"timesteps", std::to_string(ppo.total_timesteps)},
                           {"epsilon", fmt17(env.epsilon)},
                           {"alpha", fmt17(env.alpha)},
                           {"noise", to_string(env.noise)}});
    }
    rl::Checkpoint ck = rl::load_checkpoint(path);
    auto model = std::make_shared<rl::ActorCritic>(ck.arch, std::move(ck.params));
    agents.emplace(name, rl::to_policy(model, c.scenario));
  }

  parallel_for(
      todo.size(),
      [&](std::size_t k) {
        const std::size_t i = todo[k];
        const CellSpec& c = specs[i];
        const Policy policy = c.scenario == "basic"
                                  ? basic_policy()
                                  : agents.at(checkpoint_name(c.scenario, c.noise, c.alpha,
                                                              c.epsilon));
        const std::uint64_t seed =
            cell_seed(cfg.master_seed, c.scenario, c.noise, c.alpha, c.epsilon);
        CellResult r = evaluate(policy, cell_env(cfg, c), cfg.episodes, seed, cfg.f_star);
        r.scenario = c.scenario;
        r.episode_curves.clear();
        r.episode_curves.shrink_to_fit();
        write_cell_file(cell_file(cfg, c), r);
        results[i] = std::move(r);
      },
      opts.threads);

  std::vector<CellResult> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::vector<ThresholdEntry> threshold_alpha(const std::vector<CellResult>& results,
                                            double f_star) {
  struct Curve {
    ThresholdEntry entry;
    std::vector<std::pair<double, double>> points;  // (alpha, mean)
  };
  std::vector<Curve> curves;
  for (const auto& r : results) {
    auto it = std::find_if(curves.begin(), curves.end(), [&r](const Curve& c) {
      return c.entry.scenario == r.scenario && c.entry.noise == r.noise &&
             c.entry.epsilon == r.epsilon;
    });
    if (it == curves.end()) {
      curves.push_back({{r.scenario, r.noise, r.epsilon, std::nullopt}, {}});
      it = std::prev(curves.end());
    }
    it->points.emplace_back(r.alpha, r.mean_fidelity);
  }
  std::vector<ThresholdEntry> out;
  out.reserve(curves.size());
  for (auto& c : curves) {
    std::sort(c.points.begin(), c.points.end());
    if (c.points.front().second >= f_star) {
      for (const auto& [a, mean] : c.points) {
        if (mean >= f_star) c.entry.alpha = a;
      }
    }
    out.push_back(c.entry);
  }
  return out;
}

}  // namespace qfc::harness
