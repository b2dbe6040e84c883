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

#include "qfc/rl/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qfc/errors.hpp"

namespace qfc::rl {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

void require_finite(const ActionDistribution& dist) {
  if (!std::isfinite(dist.mean) || !std::isfinite(dist.log_std) ||
      (dist.stop_logit && !std::isfinite(*dist.stop_logit))) {
    throw TrainingError("action distribution has non-finite parameters");
  }
}

}  // namespace

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double gaussian_log_prob(double u, double mean, double log_std) {
  const double z = (u - mean) * std::exp(-log_std);
  return -0.5 * z * z - log_std - kHalfLog2Pi;
}

double tanh_log_jacobian(double u) {
  return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
}

double squashed_log_prob(double u, double mean, double log_std) {
  return gaussian_log_prob(u, mean, log_std) - tanh_log_jacobian(u);
}

double squashed_density(double beta, double mean, double log_std) {
  if (beta <= -1.0 || beta >= 1.0) return 0.0;
  const double u = std::atanh(beta);
  return std::exp(gaussian_log_prob(u, mean, log_std)) / (1.0 - beta * beta);
}

double bernoulli_log_prob(bool stop, double logit) {
  return stop ? -softplus(-logit) : -softplus(logit);
}

double gaussian_entropy(double log_std) { return 0.5 + kHalfLog2Pi + log_std; }

double bernoulli_entropy(double logit) {
  // H = softplus(z) - z sigmoid(z)
  return softplus(logit) - logit * sigmoid(logit);
}

double log_prob(const ActionDistribution& dist, double pre_squash, bool stop) {
  double lp = squashed_log_prob(pre_squash, dist.mean, dist.log_std);
  if (dist.stop_logit) lp += bernoulli_log_prob(stop, *dist.stop_logit);
  return lp;
}

SampledAction sample_action(const ActionDistribution& dist, RngStream& rng) {
  require_finite(dist);
  SampledAction out;
  out.pre_squash = dist.mean + std::exp(dist.log_std) * rng.normal();
  out.action.beta = std::clamp(std::tanh(out.pre_squash), -1.0, 1.0);
  if (dist.stop_logit) out.action.stop = rng.uniform() < sigmoid(*dist.stop_logit);
  out.log_prob = log_prob(dist, out.pre_squash, out.action.stop);
  return out;
}

SampledAction greedy_action(const ActionDistribution& dist) {
  require_finite(dist);
  SampledAction out;
  out.pre_squash = dist.mean;
  out.action.beta = std::tanh(dist.mean);
  if (dist.stop_logit) out.action.stop = *dist.stop_logit > 0.0;
  out.log_prob = log_prob(dist, out.pre_squash, out.action.stop);
  return out;
}

}  // namespace qfc::rl
