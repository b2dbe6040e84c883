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

#ifndef QFC_RL_TRAIN_HPP_
#define QFC_RL_TRAIN_HPP_

// Rollout collection and the PPO training loop.

#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "qfc/rl/actor_critic.hpp"
#include "qfc/rl/envs.hpp"
#include "qfc/rl/ppo.hpp"

namespace qfc::rl {

struct TrainingCurvePoint {
  int update_index = 0;
  long timesteps = 0;
  double mean_episode_reward = 0.0;  // NaN when no episode finished in the rollout
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  std::shared_ptr<ActorCritic> model;
  Policy policy;
  std::vector<TrainingCurvePoint> curve;
  long episodes = 0;
  long filter_aborts = 0;
};

using ProgressFn = std::function<void(const TrainingCurvePoint&)>;

// Feed-forward state network for mbs/dbs, recurrent outcome network for qomdp.
ArchConfig default_arch(Scenario s);

// Wraps a model as a greedy policy.
Policy to_policy(std::shared_ptr<const ActorCritic> model, const std::string& name);

// Runs ceil(total_timesteps / n_steps) collect/GAE/update cycles. Streams:
// environment (seed, 0), action sampling (seed, 1), minibatch shuffling
// (seed, 3); network initialisation uses `seed` directly. Filter divergences
// end the episode with zero reward and are counted.
TrainResult train_on_env(TrainingEnv& env, const ArchConfig& arch, const PpoConfig& cfg,
                         std::uint64_t seed, const ProgressFn& progress = {});

TrainResult train(Scenario scenario, const EnvConfig& env_cfg, const PpoConfig& cfg,
                  std::uint64_t seed, const ProgressFn& progress = {});

// update_index,timesteps,mean_episode_reward,policy_loss,value_loss,entropy
void write_training_curve(const std::filesystem::path& path,
                          const std::vector<TrainingCurvePoint>& curve);

}  // namespace qfc::rl

#endif  // QFC_RL_TRAIN_HPP_
