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

#ifndef QFC_DYNAMICS_HPP_
#define QFC_DYNAMICS_HPP_

// True noisy, nominal and filtering dynamics of the measured, controlled
// qutrit, plus episode execution.
//
// One step of the true dynamics is: noise channel, control unitary, then an
// imprecise measurement whose sampled outcome conditions the state. The
// filter applies the same control-then-conditioning order without noise.

#include <optional>
#include <vector>

#include "qfc/channels.hpp"
#include "qfc/controllers.hpp"
#include "qfc/rng.hpp"

namespace qfc {

inline constexpr int kDefaultHorizon = 20;
inline constexpr int kDefaultTarget = 2;

struct EnvConfig {
  NoiseKind noise = NoiseKind::kDepolarizing;
  double alpha = 0.0;
  double epsilon = 0.1;
  DensityOperator initial_state = DensityOperator::basis(kQutritDim, 0);
  int target_index = kDefaultTarget;
  int horizon = kDefaultHorizon;
  bool allow_wide_epsilon = false;

  // Throws ParameterError / DimensionError on an out-of-domain field.
  void validate() const;
};

// Uniformly random pure state (Haar measure on C^3).
DensityOperator random_pure_state(RngStream& rng);

// Channels and measurement prepared once for an EnvConfig.
class SystemModel {
 public:
  explicit SystemModel(const EnvConfig& cfg);

  const EnvConfig& config() const { return cfg_; }
  const QuantumChannel& noise() const { return noise_; }
  const MeasurementModel& measurement() const { return measurement_; }
  const ControlFamily& control() const { return control_; }

  ComplexMatrix unitary(double beta) const { return control_unitary(control_, beta); }
  // Same system with the noise channel removed.
  SystemModel nominal() const;

 private:
  EnvConfig cfg_;
  QuantumChannel noise_;
  MeasurementModel measurement_;
  ControlFamily control_;
};

struct StepResult {
  DensityOperator state;
  int outcome = 0;
};

StepResult step_true(const SystemModel& model, const DensityOperator& rho, double beta,
                     RngStream& rng);

// The nominal law: step_true with alpha forced to zero, outcome drawn from
// the nominal state's own statistics.
StepResult step_nominal(const SystemModel& model, const DensityOperator& rho_bar,
                        double beta, RngStream& rng);

// Deterministic filter: M_l U rho U^dagger M_l^dagger / tr(.). Throws
// FilterDivergence when the outcome has probability <= 1e-12 under the filter.
DensityOperator filter_update(const SystemModel& model, const DensityOperator& rho_hat,
                              double beta, int outcome);

enum class ObservationMode { kNominalState, kFilteredState, kOutcomeHistory };

std::string to_string(ObservationMode mode);
ObservationMode default_observation_mode(const Policy& policy);

struct StepRecord {
  int t = 0;  // 1-based step index: the state after t control steps
  double beta = 0.0;
  int outcome = 0;
  DensityOperator true_state;
  std::optional<DensityOperator> aux_state;  // nominal or filtered estimate
  double fidelity_true = 0.0;

  // Computes fidelity_true from the true state and checks the invariants.
  static StepRecord make(int t, double beta, int outcome, DensityOperator true_state,
                         std::optional<DensityOperator> aux_state, int target_index);
};

struct EpisodeTrace {
  EnvConfig config;
  double initial_fidelity = 0.0;
  std::vector<StepRecord> steps;
  double terminal_fidelity = 0.0;
  DensityOperator final_state = DensityOperator::basis(kQutritDim, 0);
  std::optional<int> stop_step;  // control steps executed before a stop

  // Fidelity of the true state at t = 0..horizon; entries after an early
  // stop repeat the final value.
  std::vector<double> fidelity_curve() const;
};

// Runs up to cfg.horizon steps of the true dynamics under `policy`, keeping
// the auxiliary state that the observation mode requires. Throws
// FilterDivergence and ContractViolation.
EpisodeTrace run_episode(const Policy& policy, const EnvConfig& cfg, RngStream& rng,
                         ObservationMode mode);
EpisodeTrace run_episode(const Policy& policy, const SystemModel& model, RngStream& rng,
                         ObservationMode mode);

// Monte-Carlo mean of the final true state over n episodes; episode e draws
// from rng.substream(e).
DensityOperator estimate_average_state(const Policy& policy, const EnvConfig& cfg, int n,
                                       const RngStream& rng);

}  // namespace qfc

#endif  // QFC_DYNAMICS_HPP_
