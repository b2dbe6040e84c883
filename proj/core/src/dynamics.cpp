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

#include "qfc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfc/errors.hpp"

namespace qfc {
namespace {

void require_beta(double beta) {
  if (!std::isfinite(beta) || beta < -1.0 || beta > 1.0) {
    std::ostringstream os;
    os << "beta=" << beta << " outside [-1, 1]";
    throw ParameterError(os.str());
  }
}

ComplexMatrix rotate(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return u * rho * u.adjoint();
}

// Samples an outcome of `pre` (the state right before measurement) and
// returns the normalised conditioned state.
StepResult measure_and_condition(const MeasurementModel& m, const ComplexMatrix& pre,
                                 RngStream& rng) {
  const RealVector p = outcome_probabilities(m, pre);
  const int l = rng.categorical(std::span<const double>(p.data(), p.size()));
  const ComplexMatrix& op = m.ops()[l];
  const ComplexMatrix post = op * pre * op.adjoint();
  const double norm = post.trace().real();
  if (!(norm > kZeroProbability)) {
    throw ContractViolation("sampled an outcome with vanishing probability");
  }
  return {DensityOperator::from_update(post / norm), l};
}

int most_likely_outcome(const DensityOperator& rho) {
  int best = 0;
  for (int k = 1; k < rho.dim(); ++k) {
    if (rho.population(k) > rho.population(best)) best = k;
  }
  return best;
}

}  // namespace

void EnvConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  const double cap = allow_wide_epsilon ? kMaxEpsilonOverride : kMaxEpsilon;
  if (!(epsilon >= 0.0 && epsilon <= cap)) throw ParameterError("epsilon out of range");
  if (initial_state.dim() != kQutritDim) throw DimensionError("initial state must be 3x3");
  if (target_index < 0 || target_index >= kQutritDim) {
    throw ParameterError("target index out of range");
  }
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
}

DensityOperator random_pure_state(RngStream& rng) {
  ComplexVector psi(kQutritDim);
  for (int i = 0; i < kQutritDim; ++i) psi[i] = Complex(rng.normal(), rng.normal());
  return DensityOperator::pure(psi);
}

SystemModel::SystemModel(const EnvConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      noise_(make_noise_channel(cfg.noise, cfg.alpha)),
      measurement_(imprecise_measurement(cfg.epsilon, cfg.allow_wide_epsilon)),
      control_(ControlFamily::standard()) {}

SystemModel SystemModel::nominal() const {
  EnvConfig c = cfg_;
  c.alpha = 0.0;
  return SystemModel(c);
}

StepResult step_true(const SystemModel& model, const DensityOperator& rho, double beta,
                     RngStream& rng) {
  require_beta(beta);
  const ComplexMatrix noisy = apply_kraus(model.noise().kraus_ops(), rho.matrix());
  const ComplexMatrix pre = rotate(model.unitary(beta), noisy);
  return measure_and_condition(model.measurement(), pre, rng);
}

StepResult step_nominal(const SystemModel& model, const DensityOperator& rho_bar,
                        double beta, RngStream& rng) {
  require_beta(beta);
  const ComplexMatrix pre = rotate(model.unitary(beta), rho_bar.matrix());
  return measure_and_condition(model.measurement(), pre, rng);
}

DensityOperator filter_update(const SystemModel& model, const DensityOperator& rho_hat,
                              double beta, int outcome) {
  require_beta(beta);
  const MeasurementModel& m = model.measurement();
  if (outcome < 0 || outcome >= m.num_outcomes()) {
    throw ParameterError("filter_update: outcome index out of range");
  }
  const ComplexMatrix pre = rotate(model.unitary(beta), rho_hat.matrix());
  const ComplexMatrix& op = m.ops()[outcome];
  const ComplexMatrix post = op * pre * op.adjoint();
  const double p = post.trace().real();
  if (!(p > kZeroProbability)) {
    std::ostringstream os;
    os << "filter assigns probability " << p << " to observed outcome " << outcome;
    throw FilterDivergence(os.str());
  }
  return DensityOperator::from_update(post / p);
}

std::string to_string(ObservationMode mode) {
  switch (mode) {
    case ObservationMode::kNominalState:
      return "nominal_state";
    case ObservationMode::kFilteredState:
      return "filtered_state";
    case ObservationMode::kOutcomeHistory:
      return "outcome_history";
  }
  return "unknown";
}

ObservationMode default_observation_mode(const Policy& policy) {
  return policy.observation_kind() == ObservationKind::kFullState
             ? ObservationMode::kFilteredState
             : ObservationMode::kOutcomeHistory;
}

StepRecord StepRecord::make(int t, double beta, int outcome, DensityOperator true_state,
                            std::optional<DensityOperator> aux_state, int target_index) {
  const ValidationReport report = validate_density(true_state.matrix());
  if (!report.ok) throw StateValidityError("step record: " + report.describe());
  const double f = fidelity_pure_target(true_state, target_index);
  return StepRecord{t, beta, outcome, std::move(true_state), std::move(aux_state), f};
}

std::vector<double> EpisodeTrace::fidelity_curve() const {
  std::vector<double> curve;
  curve.reserve(config.horizon + 1);
  curve.push_back(initial_fidelity);
  for (const auto& s : steps) curve.push_back(s.fidelity_true);
  while (static_cast<int>(curve.size()) < config.horizon + 1) curve.push_back(curve.back());
  return curve;
}

EpisodeTrace run_episode(const Policy& policy, const EnvConfig& cfg, RngStream& rng,
                         ObservationMode mode) {
  return run_episode(policy, SystemModel(cfg), rng, mode);
}

EpisodeTrace run_episode(const Policy& policy, const SystemModel& model, RngStream& rng,
                         ObservationMode mode) {
  const EnvConfig& cfg = model.config();
  const bool wants_state = policy.observation_kind() == ObservationKind::kFullState;
  if (wants_state == (mode == ObservationMode::kOutcomeHistory)) {
    throw ContractViolation("policy '" + policy.name() + "' cannot run in " +
                            to_string(mode) + " mode");
  }
  const SystemModel nominal = model.nominal();

  EpisodeTrace trace;
  trace.config = cfg;
  trace.steps.reserve(cfg.horizon);

  DensityOperator rho = cfg.initial_state;
  DensityOperator aux = cfg.initial_state;
  Observation obs = FullState{cfg.initial_state};
  if (!wants_state) {
    if (policy.measures_on_reset()) {
      // Identity control, then a real measurement provides l_0.
      StepResult first = step_true(model, rho, 0.0, rng);
      rho = first.state;
      obs = OutcomePair{first.outcome, 0.0};
    } else {
      obs = OutcomePair{most_likely_outcome(rho), 0.0};
    }
  }
  trace.initial_fidelity = fidelity_pure_target(rho, cfg.target_index);

  PolicySession session(policy);
  for (int t = 1; t <= cfg.horizon; ++t) {
    const ControlAction action = session.act(obs, rng);
    if (action.stop && policy.has_stop_action()) {
      trace.stop_step = t - 1;
      break;
    }
    StepResult next = step_true(model, rho, action.beta, rng);
    rho = next.state;
    std::optional<DensityOperator> aux_record;
    switch (mode) {
      case ObservationMode::kNominalState:
        aux = step_nominal(nominal, aux, action.beta, rng).state;
        aux_record = aux;
        obs = FullState{aux};
        break;
      case ObservationMode::kFilteredState:
        aux = filter_update(nominal, aux, action.beta, next.outcome);
        aux_record = aux;
        obs = FullState{aux};
        break;
      case ObservationMode::kOutcomeHistory:
        obs = OutcomePair{next.outcome, action.beta};
        break;
    }
    trace.steps.push_back(StepRecord::make(t, action.beta, next.outcome, rho,
                                           std::move(aux_record), cfg.target_index));
  }
  trace.final_state = rho;
  trace.terminal_fidelity = fidelity_pure_target(rho, cfg.target_index);
  return trace;
}

DensityOperator estimate_average_state(const Policy& policy, const EnvConfig& cfg, int n,
                                       const RngStream& rng) {
  if (n < 1) throw ParameterError("estimate_average_state: need n >= 1");
  const SystemModel model(cfg);
  const ObservationMode mode = default_observation_mode(policy);
  ComplexMatrix sum = ComplexMatrix::Zero(kQutritDim, kQutritDim);
  for (int e = 0; e < n; ++e) {
    RngStream episode_rng = rng.substream(static_cast<std::uint64_t>(e));
    const EpisodeTrace trace = run_episode(policy, model, episode_rng, mode);
    sum += trace.final_state.matrix();
  }
  return DensityOperator::from_update(sum / static_cast<double>(n));
}

}  // namespace qfc
