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

#ifndef QFC_HARNESS_HPP_
#define QFC_HARNESS_HPP_

// Grid sweeps over (scenario, noise, alpha, epsilon), per-cell evaluation,
// threshold summaries and CSV / SVG reports.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qfc/dynamics.hpp"

namespace qfc::harness {

// Controllers a sweep can evaluate.
inline const std::vector<std::string> kScenarioNames{"basic", "mbs", "dbs", "qomdp"};

struct SweepConfig {
  std::vector<NoiseKind> noises{NoiseKind::kDepolarizing, NoiseKind::kAmplitudeDamping,
                                NoiseKind::kRandomPermutation};
  std::vector<double> alphas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> epsilons{0.1, 0.15, 0.175, 0.2, 0.25, 0.3};
  std::vector<std::string> scenarios{"basic"};
  int episodes = 1000;
  int horizon = kDefaultHorizon;
  std::uint64_t master_seed = 0;
  double f_star = 0.9;

  std::filesystem::path out_dir = "qfc_out";
  std::filesystem::path checkpoint_dir = "checkpoints";
  bool train_on_demand = false;
  long train_timesteps = 200000;

  // Full training/test grid (the defaults above).
  static SweepConfig full();
  // alpha {0, 0.2, 0.4, 0.6}, epsilon {0.1, 0.2}, 200 episodes.
  static SweepConfig desk_scale();
  void apply_desk_scale();

  // Throws ConfigError.
  void validate() const;
};

// Line-oriented `key = value` text; see the README for the grammar. Relative
// paths are resolved against `base_dir`. Throws ConfigError.
SweepConfig parse_sweep_config(const std::string& text,
                               const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& path);

struct CellResult {
  std::string scenario;
  NoiseKind noise = NoiseKind::kDepolarizing;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  int episodes = 0;
  int aborted = 0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;
  double mean_steps_to_threshold = 0.0;  // NaN when no episode reached F*
  double std_steps_to_threshold = 0.0;
  int unreached_count = 0;
  // Mean true fidelity at t = 0..horizon over completed episodes.
  std::vector<double> mean_curve;
  // Per-episode curves; kept in memory only.
  std::vector<std::vector<double>> episode_curves;

  bool operator==(const CellResult& other) const;
};

// n validation episodes under the true noisy dynamics, episode e drawing from
// RngStream(seed, e). Filter divergences are counted in `aborted`.
CellResult evaluate(const Policy& policy, const EnvConfig& env_cfg, int n, std::uint64_t seed,
                    double f_star = 0.9);

// First t with running true fidelity >= f_star per episode; fills the mean /
// std / unreached fields of `cell` from its episode curves.
void steps_to_threshold(CellResult& cell, double f_star);

// mix64(master_seed ^ fnv1a64("scenario|noise|alpha|epsilon")), with both
// reals printed as %.17g.
std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& scenario, NoiseKind noise,
                        double alpha, double epsilon);

// Checkpoint file names inside the checkpoint directory. mbs and qomdp
// agents are trained at alpha = 0 and shared across noises and alphas.
std::string checkpoint_name(const std::string& scenario, NoiseKind noise, double alpha,
                            double epsilon);

struct SweepOptions {
  bool resume = false;
  int threads = 0;  // 0: worker_count()
  std::function<void(const std::string&)> log;
};

// One CellResult per (scenario, noise, epsilon, alpha) in that nesting order.
// Each finished cell is also written under out_dir/cells/; with resume,
// readable cell files are reused instead of recomputed. Throws
// MissingCheckpoint when an RL checkpoint is absent and train_on_demand is
// off.
std::vector<CellResult> sweep(const SweepConfig& cfg, const SweepOptions& opts = {});

struct ThresholdEntry {
  std::string scenario;
  NoiseKind noise = NoiseKind::kDepolarizing;
  double epsilon = 0.0;
  std::optional<double> alpha;
};

// Per (scenario, noise, epsilon) curve: the largest grid alpha whose mean
// terminal fidelity reaches f_star. Absent when the smallest alpha already
// fails. NaN means count as failing.
std::vector<ThresholdEntry> threshold_alpha(const std::vector<CellResult>& results,
                                            double f_star);

// results.csv, thresholds.csv, curves.csv and <noise>_<metric>.svg.
void emit_report(const std::vector<CellResult>& results,
                 const std::vector<ThresholdEntry>& thresholds, double f_star,
                 const std::filesystem::path& out_dir);

std::string results_csv_header();
std::string results_csv_row(const CellResult& cell);
CellResult parse_results_csv_row(const std::string& line);
// Reads results.csv and, when present, curves.csv from `dir`.
std::vector<CellResult> load_results(const std::filesystem::path& dir);

}  // namespace qfc::harness

#endif  // QFC_HARNESS_HPP_
