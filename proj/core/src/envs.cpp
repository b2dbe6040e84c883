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

#include "qfc/rl/envs.hpp"

#include "qfc/errors.hpp"

namespace qfc::rl {
namespace {

EnvConfig effective_config(EnvKind kind, EnvConfig cfg) {
  if (kind == EnvKind::kMbsTrain || kind == EnvKind::kQomdpTrain) cfg.alpha = 0.0;
  return cfg;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kMbs:
      return "mbs";
    case Scenario::kDbs:
      return "dbs";
    case Scenario::kQomdp:
      return "qomdp";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "mbs") return Scenario::kMbs;
  if (name == "dbs") return Scenario::kDbs;
  if (name == "qomdp") return Scenario::kQomdp;
  throw ParameterError("unknown scenario '" + name + "'");
}

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kMbsTrain:
      return "mbs_train";
    case EnvKind::kDbsTrain:
      return "dbs_train";
    case EnvKind::kQomdpTrain:
      return "qomdp_train";
    case EnvKind::kValidation:
      return "validation";
  }
  return "unknown";
}

EnvKind training_env_kind(Scenario s) {
  switch (s) {
    case Scenario::kMbs:
      return EnvKind::kMbsTrain;
    case Scenario::kDbs:
      return EnvKind::kDbsTrain;
    case Scenario::kQomdp:
      return EnvKind::kQomdpTrain;
  }
  throw ParameterError("training_env_kind: unknown scenario");
}

double mb_db_reward(const DensityOperator& rho_obs, const EnvConfig& cfg) {
  return fidelity_pure_target(rho_obs, cfg.target_index);
}

double qomdp_reward(bool stop, std::optional<int> l_last, bool done, int target) {
  if (stop) {
    if (!l_last) throw ContractViolation("qomdp_reward: stop without a readout");
    return *l_last == target ? 1.0 : -1.0;
  }
  return done ? -1.0 : 0.0;
}

ScenarioEnv::ScenarioEnv(EnvKind kind, const EnvConfig& cfg, ObservationKind validation_obs,
                         bool terminal_reward_only)
    : kind_(kind),
      model_(effective_config(kind, cfg)),
      validation_obs_(validation_obs),
      terminal_reward_only_(terminal_reward_only),
      readout_measurement_(terminal_measurement()),
      rho_(cfg.initial_state),
      estimate_(cfg.initial_state) {}

ObservationKind ScenarioEnv::observation_kind() const {
  switch (kind_) {
    case EnvKind::kMbsTrain:
    case EnvKind::kDbsTrain:
      return ObservationKind::kFullState;
    case EnvKind::kQomdpTrain:
      return ObservationKind::kOutcomePair;
    case EnvKind::kValidation:
      return validation_obs_;
  }
  return ObservationKind::kFullState;
}

Observation ScenarioEnv::reset(RngStream& rng) {
  const EnvConfig& cfg = model_.config();
  rho_ = cfg.initial_state;
  estimate_ = cfg.initial_state;
  t_ = 0;
  done_ = false;
  readout_.reset();
  if (observation_kind() == ObservationKind::kOutcomePair) {
    // No control at t = 0: identity evolution, then the first measurement.
    const StepResult first = step_true(model_, rho_, 0.0, rng);
    rho_ = first.state;
    estimate_ = rho_;
    return OutcomePair{first.outcome, 0.0};
  }
  return FullState{estimate_};
}

EnvStep ScenarioEnv::finish_step(Observation obs, double reward) {
  ++t_;
  done_ = t_ >= model_.config().horizon;
  if (terminal_reward_only_ && kind_ != EnvKind::kQomdpTrain && !done_) reward = 0.0;
  return {std::move(obs), reward, done_};
}

EnvStep ScenarioEnv::step(const ControlAction& action, RngStream& rng) {
  if (done_) throw ContractViolation("ScenarioEnv::step called on a finished episode");
  check_action(action);
  const EnvConfig& cfg = model_.config();
  switch (kind_) {
    case EnvKind::kMbsTrain: {
      const StepResult next = step_nominal(model_, estimate_, action.beta, rng);
      estimate_ = next.state;
      rho_ = next.state;
      return finish_step(FullState{estimate_}, mb_db_reward(estimate_, cfg));
    }
    case EnvKind::kDbsTrain: {
      const StepResult next = step_true(model_, rho_, action.beta, rng);
      rho_ = next.state;
      try {
        estimate_ = filter_update(model_, estimate_, action.beta, next.outcome);
      } catch (const FilterDivergence&) {
        done_ = true;
        throw;
      }
      return finish_step(FullState{estimate_}, mb_db_reward(estimate_, cfg));
    }
    case EnvKind::kQomdpTrain: {
      if (action.stop) {
        const RealVector p = outcome_probabilities(readout_measurement_, rho_);
        readout_ = rng.categorical(std::span<const double>(p.data(), p.size()));
        rho_ = condition_on_outcome(readout_measurement_, rho_, *readout_);
        done_ = true;
        return {OutcomePair{*readout_, action.beta},
                qomdp_reward(true, readout_, true, cfg.target_index), true};
      }
      const StepResult next = step_true(model_, rho_, action.beta, rng);
      rho_ = next.state;
      const bool last = t_ + 1 >= cfg.horizon;
      return finish_step(OutcomePair{next.outcome, action.beta},
                         qomdp_reward(false, std::nullopt, last, cfg.target_index));
    }
    case EnvKind::kValidation: {
      const StepResult next = step_true(model_, rho_, action.beta, rng);
      rho_ = next.state;
      if (validation_obs_ == ObservationKind::kFullState) {
        try {
          estimate_ = filter_update(model_, estimate_, action.beta, next.outcome);
        } catch (const FilterDivergence&) {
          done_ = true;
          throw;
        }
      }
      Observation obs = validation_obs_ == ObservationKind::kFullState
                            ? Observation(FullState{estimate_})
                            : Observation(OutcomePair{next.outcome, action.beta});
      return finish_step(std::move(obs), fidelity_pure_target(rho_, cfg.target_index));
    }
  }
  throw ContractViolation("ScenarioEnv: unknown kind");
}

}  // namespace qfc::rl
