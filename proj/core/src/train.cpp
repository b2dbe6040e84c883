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

#include "qfc/rl/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "qfc/errors.hpp"

namespace qfc::rl {

ArchConfig default_arch(Scenario s) {
  return s == Scenario::kQomdp ? ArchConfig::recurrent_outcome() : ArchConfig::feed_forward();
}

Policy to_policy(std::shared_ptr<const ActorCritic> model, const std::string& name) {
  return Policy(Stochastic{std::move(model), true}, name);
}

TrainResult train_on_env(TrainingEnv& env, const ArchConfig& arch, const PpoConfig& cfg,
                         std::uint64_t seed, const ProgressFn& progress) {
  cfg.validate();
  if (env.observation_kind() != arch.observation_kind) {
    throw ContractViolation("train: environment and network observation kinds differ");
  }
  auto model = std::make_shared<ActorCritic>(arch, seed);
  TrainResult result{model, to_policy(model, "trained"), {}, 0, 0};
  if (cfg.total_timesteps == 0) return result;

  Adam optimizer(model->params().size(), cfg.learning_rate, 0.9, 0.999, cfg.adam_eps);
  RngStream env_rng(seed, 0);
  RngStream sample_rng(seed, 1);
  RngStream shuffle_rng(seed, 3);

  const std::vector<double> init_memory = model->initial_memory();
  RolloutBuffer buffer(cfg.n_steps, arch.obs_dim, static_cast<int>(init_memory.size()));
  Observation obs = env.reset(env_rng);
  std::vector<double> memory = init_memory;
  bool episode_start = true;
  double episode_reward = 0.0;

  const long updates = (cfg.total_timesteps + cfg.n_steps - 1) / cfg.n_steps;
  long timesteps = 0;
  for (long u = 0; u < updates; ++u) {
    buffer.clear();
    double finished_reward = 0.0;
    long finished = 0;
    bool last_done = false;
    for (int i = 0; i < cfg.n_steps; ++i) {
      const Vector x = model->encode(obs);
      const std::vector<double> memory_before = memory;
      const ActorCritic::StepOutput out = model->step(x, memory);
      const SampledAction s = sample_action(out.dist, sample_rng);
      EnvStep st{obs, 0.0, false};
      try {
        st = env.step(s.action, env_rng);
      } catch (const FilterDivergence&) {
        st.reward = 0.0;
        st.done = true;
        ++result.filter_aborts;
      }
      buffer.add(x, s.pre_squash, s.action.stop, s.log_prob, st.reward, out.value, st.done,
                 episode_start, memory_before);
      episode_reward += st.reward;
      last_done = st.done;
      if (st.done) {
        finished_reward += episode_reward;
        ++finished;
        ++result.episodes;
        episode_reward = 0.0;
        obs = env.reset(env_rng);
        memory = init_memory;
        episode_start = true;
      } else {
        obs = std::move(st.observation);
        episode_start = false;
      }
    }
    timesteps += cfg.n_steps;
    buffer.set_bootstrap_value(last_done ? 0.0 : model->value_only(model->encode(obs), memory));
    compute_gae(buffer, cfg.gamma, cfg.gae_lambda);
    const UpdateStats stats = ppo_update(*model, optimizer, buffer, cfg, shuffle_rng);

    TrainingCurvePoint pt;
    pt.update_index = static_cast<int>(u);
    pt.timesteps = timesteps;
    pt.mean_episode_reward = finished > 0 ? finished_reward / static_cast<double>(finished)
                                          : std::numeric_limits<double>::quiet_NaN();
    pt.policy_loss = stats.policy_loss;
    pt.value_loss = stats.value_loss;
    pt.entropy = stats.entropy;
    result.curve.push_back(pt);
    if (progress) progress(pt);
  }
  return result;
}

TrainResult train(Scenario scenario, const EnvConfig& env_cfg, const PpoConfig& cfg,
                  std::uint64_t seed, const ProgressFn& progress) {
  env_cfg.validate();
  ScenarioEnv env(training_env_kind(scenario), env_cfg, ObservationKind::kFullState,
                  cfg.terminal_reward_only);
  TrainResult r = train_on_env(env, default_arch(scenario), cfg, seed, progress);
  r.policy = to_policy(r.model, to_string(scenario));
  return r;
}

void write_training_curve(const std::filesystem::path& path,
                          const std::vector<TrainingCurvePoint>& curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "update_index,timesteps,mean_episode_reward,policy_loss,value_loss,entropy\n";
  char buf[512];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%d,%ld,%.17g,%.17g,%.17g,%.17g\n", p.update_index,
                  p.timesteps, p.mean_episode_reward, p.policy_loss, p.value_loss, p.entropy);
    out << buf;
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace qfc::rl
