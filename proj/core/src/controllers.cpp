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

#include "qfc/controllers.hpp"

#include <cmath>
#include <sstream>

#include "qfc/channels.hpp"
#include "qfc/errors.hpp"

namespace qfc {

std::string to_string(ObservationKind kind) {
  return kind == ObservationKind::kFullState ? "full_state" : "outcome_pair";
}

ObservationKind kind_of(const Observation& obs) {
  return std::holds_alternative<FullState>(obs) ? ObservationKind::kFullState
                                                : ObservationKind::kOutcomePair;
}

void check_action(const ControlAction& action) {
  if (!std::isfinite(action.beta) || action.beta < -1.0 || action.beta > 1.0) {
    std::ostringstream os;
    os << "control action beta=" << action.beta << " outside [-1, 1]";
    throw ContractViolation(os.str());
  }
}

Policy::Policy(BasicTable table, std::string name)
    : rule_(table), name_(std::move(name)) {
  for (double b : table.beta_by_outcome) check_action({b, false});
}

Policy::Policy(Stochastic stochastic, std::string name)
    : rule_(std::move(stochastic)), name_(std::move(name)) {
  if (!std::get<Stochastic>(rule_).model) {
    throw ContractViolation("stochastic policy without a model");
  }
}

ObservationKind Policy::observation_kind() const {
  if (const auto* s = std::get_if<Stochastic>(&rule_)) return s->model->observation_kind();
  return ObservationKind::kOutcomePair;
}

bool Policy::has_stop_action() const {
  if (const auto* s = std::get_if<Stochastic>(&rule_)) return s->model->has_stop_action();
  return false;
}

bool Policy::measures_on_reset() const {
  return !is_table() && observation_kind() == ObservationKind::kOutcomePair;
}

Policy Policy::with_greedy(bool greedy) const {
  Policy copy = *this;
  if (auto* s = std::get_if<Stochastic>(&copy.rule_)) s->greedy = greedy;
  return copy;
}

Policy basic_policy() { return Policy(BasicTable{{1.0, 1.0, 0.0}}, "basic"); }

Policy constant_policy(double beta) {
  std::ostringstream name;
  name << "constant(" << beta << ")";
  return Policy(BasicTable{{beta, beta, beta}}, name.str());
}

BasicGains derive_basic_gains(int grid_points) {
  if (grid_points < 3) throw ParameterError("derive_basic_gains: need at least 3 grid points");
  const ControlFamily family = ControlFamily::standard();
  BasicGains best{0.0, 0.0, -1.0, -1.0};
  for (int i = 0; i < grid_points; ++i) {
    const double beta = (i == grid_points - 1)
                            ? 1.0
                            : -1.0 + 2.0 * static_cast<double>(i) / (grid_points - 1);
    const ComplexMatrix u = control_unitary(family, beta);
    const double obj0 = std::norm(u(2, 0));
    const double obj1 = std::norm(u(2, 1));
    // Tolerance lets the mirror-image optimum at -beta lose the tie.
    if (obj0 >= best.objective0 - 1e-12) {
      best.objective0 = obj0;
      best.beta0 = beta;
    }
    if (obj1 >= best.objective1 - 1e-12) {
      best.objective1 = obj1;
      best.beta1 = beta;
    }
  }
  return best;
}

PolicySession::PolicySession(const Policy& policy) : policy_(&policy) { reset(); }

void PolicySession::reset() {
  memory_.clear();
  if (const auto* s = std::get_if<Stochastic>(&policy_->rule())) {
    memory_ = s->model->initial_memory();
  }
}

ControlAction PolicySession::act(const Observation& obs, RngStream& rng) {
  if (kind_of(obs) != policy_->observation_kind()) {
    throw ContractViolation("policy '" + policy_->name() + "' expects " +
                            to_string(policy_->observation_kind()) + " observations, got " +
                            to_string(kind_of(obs)));
  }
  ControlAction action;
  if (const auto* table = std::get_if<BasicTable>(&policy_->rule())) {
    const int l = std::get<OutcomePair>(obs).last_outcome;
    if (l < 0 || l >= static_cast<int>(table->beta_by_outcome.size())) {
      throw ContractViolation("basic policy: outcome index out of range");
    }
    action.beta = table->beta_by_outcome[l];
  } else {
    const auto& s = std::get<Stochastic>(policy_->rule());
    action = s.model->act(obs, memory_, rng, s.greedy);
    if (!s.model->has_stop_action()) action.stop = false;
  }
  check_action(action);
  return action;
}

ControlAction policy_act(const Policy& policy, const Observation& obs, RngStream& rng) {
  PolicySession session(policy);
  return session.act(obs, rng);
}

}  // namespace qfc
