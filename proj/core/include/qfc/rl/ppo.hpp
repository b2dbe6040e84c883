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

#ifndef QFC_RL_PPO_HPP_
#define QFC_RL_PPO_HPP_

// Rollout storage, generalized advantage estimation and the clipped-surrogate
// proximal policy optimization update.

#include <span>
#include <vector>

#include "qfc/rl/actor_critic.hpp"
#include "qfc/rl/envs.hpp"

namespace qfc::rl {

struct PpoConfig {
  int n_steps = 512;
  int batch_size = 512;
  double learning_rate = 1e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_range = 0.2;
  int epochs = 10;
  double ent_coef = 0.0;
  double vf_coef = 0.5;
  double max_grad_norm = 0.5;
  double adam_eps = 1e-5;
  bool normalize_advantage = true;
  long total_timesteps = 200000;
  // MBs/DBs only: reward the fidelity at the horizon instead of every step.
  bool terminal_reward_only = false;

  void validate() const;
  // Learning rate 1e-4 for mbs/dbs, 3e-4 for qomdp; everything else shared.
  static PpoConfig defaults_for(Scenario s);
};

class RolloutBuffer {
 public:
  RolloutBuffer(int capacity, int obs_dim, int memory_size);

  void add(const Vector& obs, double pre_squash, bool stop, double log_prob, double reward,
           double value, bool done, bool episode_start, const std::vector<double>& memory);
  void clear();

  int capacity() const { return capacity_; }
  int size() const { return size_; }
  bool full() const { return size_ == capacity_; }
  int obs_dim() const { return static_cast<int>(obs_.rows()); }

  const Matrix& observations() const { return obs_; }
  const std::vector<double>& pre_squash() const { return pre_squash_; }
  const std::vector<double>& stops() const { return stop_; }
  const std::vector<double>& log_probs() const { return log_prob_; }
  const std::vector<double>& rewards() const { return reward_; }
  const std::vector<double>& values() const { return value_; }
  const std::vector<double>& dones() const { return done_; }
  const std::vector<bool>& episode_starts() const { return episode_start_; }
  const std::vector<double>& memory_at(int i) const { return memory_[i]; }

  double bootstrap_value() const { return bootstrap_value_; }
  void set_bootstrap_value(double v) { bootstrap_value_ = v; }

  std::vector<double>& advantages() { return advantages_; }
  std::vector<double>& returns() { return returns_; }
  const std::vector<double>& advantages() const { return advantages_; }
  const std::vector<double>& returns() const { return returns_; }
  bool has_advantages() const { return !advantages_.empty(); }

  // Sequences split at episode starts (and at the buffer start).
  std::vector<std::pair<int, int>> sequences() const;

 private:
  int capacity_;
  int size_ = 0;
  Matrix obs_;
  std::vector<double> pre_squash_, stop_, log_prob_, reward_, value_, done_;
  std::vector<bool> episode_start_;
  std::vector<std::vector<double>> memory_;
  double bootstrap_value_ = 0.0;
  std::vector<double> advantages_, returns_;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1},
// delta_t = r_t + gamma (1 - done_t) V_{t+1} - V_t, with V_T the bootstrap.
// done_t marks that the episode ended at step t.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const double> dones, double bootstrap_value, double gamma,
                      double lambda);
// Fills buffer.advantages() and buffer.returns(); requires a full buffer.
void compute_gae(RolloutBuffer& buffer, double gamma, double lambda);

struct LossTerms {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  std::vector<double> ratios;
};

// Builds the network input for a set of buffer rows. For recurrent models
// `rows` must be a concatenation of whole sequences in buffer order.
Batch make_batch(const ActorCritic& model, const RolloutBuffer& buffer,
                 const std::vector<int>& rows);

// Loss on one minibatch and its gradient, accumulated into grad (if given).
// loss = -mean(min(r A, clip(r) A)) + vf_coef mean((R - V)^2) - ent_coef mean(H)
LossTerms ppo_loss(const ActorCritic& model, const RolloutBuffer& buffer,
                   const std::vector<int>& rows, const PpoConfig& cfg, NetworkParams* grad);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int gradient_steps = 0;
};

// Minibatch layout for one epoch: shuffled rows (feed-forward) or shuffled
// whole sequences packed up to batch_size rows (recurrent).
std::vector<std::vector<int>> make_minibatches(const ActorCritic& model,
                                               const RolloutBuffer& buffer, int batch_size,
                                               RngStream& rng);

// Runs cfg.epochs passes over the buffer. Throws TrainingError on a NaN loss.
UpdateStats ppo_update(ActorCritic& model, Adam& optimizer, const RolloutBuffer& buffer,
                       const PpoConfig& cfg, RngStream& rng);

}  // namespace qfc::rl

#endif  // QFC_RL_PPO_HPP_
