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

#ifndef QFC_RL_DISTRIBUTIONS_HPP_
#define QFC_RL_DISTRIBUTIONS_HPP_

// Tanh-squashed Gaussian control amplitude with an optional independent
// Bernoulli stop decision.

#include <optional>

#include "qfc/controllers.hpp"
#include "qfc/rng.hpp"

namespace qfc::rl {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct ActionDistribution {
  double mean = 0.0;     // pre-squash Gaussian mean
  double log_std = 0.0;  // pre-squash Gaussian log standard deviation
  std::optional<double> stop_logit;
};

struct SampledAction {
  ControlAction action;
  double pre_squash = 0.0;  // u with beta = tanh(u)
  double log_prob = 0.0;    // joint log-density of (beta, stop)
};

double softplus(double x);
double sigmoid(double x);

double gaussian_log_prob(double u, double mean, double log_std);
// log(1 - tanh(u)^2), evaluated without cancellation.
double tanh_log_jacobian(double u);
// Log-density of beta = tanh(u) including the change-of-variables term.
double squashed_log_prob(double u, double mean, double log_std);
// Density of beta in (-1, 1); used for quadrature checks.
double squashed_density(double beta, double mean, double log_std);
double bernoulli_log_prob(bool stop, double logit);

double gaussian_entropy(double log_std);
double bernoulli_entropy(double logit);

double log_prob(const ActionDistribution& dist, double pre_squash, bool stop);

SampledAction sample_action(const ActionDistribution& dist, RngStream& rng);
SampledAction greedy_action(const ActionDistribution& dist);

}  // namespace qfc::rl

#endif  // QFC_RL_DISTRIBUTIONS_HPP_
