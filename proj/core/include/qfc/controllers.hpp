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

#ifndef QFC_CONTROLLERS_HPP_
#define QFC_CONTROLLERS_HPP_

// The policy abstraction shared by every controller, and the analytic basic
// controller that maps the most recent outcome to a fixed control amplitude.

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qfc/qcore.hpp"
#include "qfc/rng.hpp"

namespace qfc {

enum class ObservationKind { kFullState, kOutcomePair };

std::string to_string(ObservationKind kind);

struct FullState {
  DensityOperator state;
};

struct OutcomePair {
  int last_outcome = 0;
  double last_beta = 0.0;
};

using Observation = std::variant<FullState, OutcomePair>;

ObservationKind kind_of(const Observation& obs);

struct ControlAction {
  double beta = 0.0;
  bool stop = false;
};

// Throws ContractViolation unless beta is finite and within [-1, 1].
void check_action(const ControlAction& action);

// A learned stochastic decision rule. Implementations must be safe to call
// concurrently; all per-episode state lives in the caller-owned `memory`.
class StochasticModel {
 public:
  virtual ~StochasticModel() = default;

  virtual ObservationKind observation_kind() const = 0;
  virtual bool has_stop_action() const = 0;
  // Per-episode memory at reset (recurrent hidden state; empty if none).
  virtual std::vector<double> initial_memory() const = 0;
  // greedy: tanh of the mean and stop iff the stop logit is positive.
  virtual ControlAction act(const Observation& obs, std::vector<double>& memory,
                            RngStream& rng, bool greedy) const = 0;
};

struct BasicTable {
  std::array<double, 3> beta_by_outcome{1.0, 1.0, 0.0};
};

struct Stochastic {
  std::shared_ptr<const StochasticModel> model;
  bool greedy = true;
};

class Policy {
 public:
  Policy(BasicTable table, std::string name = "basic");
  Policy(Stochastic stochastic, std::string name);

  const std::variant<BasicTable, Stochastic>& rule() const { return rule_; }
  const std::string& name() const { return name_; }
  ObservationKind observation_kind() const;
  bool is_table() const { return std::holds_alternative<BasicTable>(rule_); }
  bool has_stop_action() const;
  // Outcome-only learned policies start from a measurement of the initial
  // state instead of a pseudo-outcome.
  bool measures_on_reset() const;

  // Same rule with sampling switched on or off (no-op for tables).
  Policy with_greedy(bool greedy) const;

 private:
  std::variant<BasicTable, Stochastic> rule_;
  std::string name_;
};

// beta = 1 after outcomes 0 and 1, beta = 0 after outcome 2.
Policy basic_policy();

// Outcome-independent constant control; useful for open-loop experiments.
Policy constant_policy(double beta);

struct BasicGains {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double objective0 = 0.0;  // |<2|U_beta0|0>|^2
  double objective1 = 0.0;  // |<2|U_beta1|1>|^2
};

// Grid search of |<2|U_beta|k>|^2 over an evenly spaced grid on [-1, 1]
// (endpoints included). Ties resolve to the larger beta.
BasicGains derive_basic_gains(int grid_points = 201);

// Holds the per-episode memory of a policy.
class PolicySession {
 public:
  explicit PolicySession(const Policy& policy);

  // Validates the observation kind and the emitted action.
  ControlAction act(const Observation& obs, RngStream& rng);
  void reset();

 private:
  const Policy* policy_;
  std::vector<double> memory_;
};

ControlAction policy_act(const Policy& policy, const Observation& obs, RngStream& rng);

}  // namespace qfc

#endif  // QFC_CONTROLLERS_HPP_
