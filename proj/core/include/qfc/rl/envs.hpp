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

#ifndef QFC_RL_ENVS_HPP_
#define QFC_RL_ENVS_HPP_

// Gym-style training environments for the three learning scenarios.
//
//   mbs    nominal (noise-free) dynamics, nominal state observed, fidelity reward
//   dbs    true dynamics at the configured alpha, filtered state observed
//   qomdp  true dynamics at alpha = 0, (last outcome, previous beta) observed,
//          stop action followed by a projective readout decides the reward

#include <memory>
#include <optional>
#include <string>

#include "qfc/dynamics.hpp"

namespace qfc::rl {

enum class Scenario { kMbs, kDbs, kQomdp };

std::string to_string(Scenario s);
// Accepts "mbs", "dbs", "qomdp".
Scenario parse_scenario(const std::string& name);

struct EnvStep {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

class TrainingEnv {
 public:
  virtual ~TrainingEnv() = default;

  virtual ObservationKind observation_kind() const = 0;
  virtual Observation reset(RngStream& rng) = 0;
  // Throws ContractViolation after the episode is done.
  virtual EnvStep step(const ControlAction& action, RngStream& rng) = 0;
};

// Per-step fidelity of the observed state with the target basis state.
double mb_db_reward(const DensityOperator& rho_obs, const EnvConfig& cfg);

// 0 while running, -1 on timeout, +1 / -1 after a stop depending on whether
// the projective readout hit the target. Throws ContractViolation when a stop
// comes without a readout.
double qomdp_reward(bool stop, std::optional<int> l_last, bool done, int target);

enum class EnvKind { kMbsTrain, kDbsTrain, kQomdpTrain, kValidation };

std::string to_string(EnvKind kind);
EnvKind training_env_kind(Scenario s);

class ScenarioEnv final : public TrainingEnv {
 public:
  // kValidation runs the true dynamics at cfg.alpha, observes the filtered
  // state (or outcome pairs when validation_obs says so) and rewards the
  // fidelity of the true state.
  ScenarioEnv(EnvKind kind, const EnvConfig& cfg,
              ObservationKind validation_obs = ObservationKind::kFullState,
              bool terminal_reward_only = false);

  EnvKind kind() const { return kind_; }
  const EnvConfig& config() const { return model_.config(); }
  ObservationKind observation_kind() const override;
  Observation reset(RngStream& rng) override;
  EnvStep step(const ControlAction& action, RngStream& rng) override;

  const DensityOperator& true_state() const { return rho_; }
  const DensityOperator& estimate() const { return estimate_; }
  int steps_taken() const { return t_; }
  bool done() const { return done_; }
  std::optional<int> last_readout() const { return readout_; }

 private:
  EnvStep finish_step(Observation obs, double reward);

  EnvKind kind_;
  SystemModel model_;  // alpha already forced to 0 where the scenario says so
  ObservationKind validation_obs_;
  bool terminal_reward_only_;
  MeasurementModel readout_measurement_;
  DensityOperator rho_;
  DensityOperator estimate_;
  int t_ = 0;
  bool done_ = true;
  std::optional<int> readout_;
};

}  // namespace qfc::rl

#endif  // QFC_RL_ENVS_HPP_
