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

#include "qfc/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qfc/errors.hpp"

namespace qfc::rl {

void PpoConfig::validate() const {
  if (n_steps < 1) throw ParameterError("PpoConfig: n_steps must be positive");
  if (batch_size < 1 || batch_size > n_steps) {
    throw ParameterError("PpoConfig: batch_size must lie in [1, n_steps]");
  }
  if (!(learning_rate > 0.0)) throw ParameterError("PpoConfig: learning_rate must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("PpoConfig: gamma outside [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw ParameterError("PpoConfig: gae_lambda outside [0, 1]");
  }
  if (!(clip_range > 0.0)) throw ParameterError("PpoConfig: clip_range must be positive");
  if (epochs < 1) throw ParameterError("PpoConfig: epochs must be positive");
  if (!(ent_coef >= 0.0) || !(vf_coef >= 0.0)) {
    throw ParameterError("PpoConfig: loss coefficients must be nonnegative");
  }
  if (!(max_grad_norm > 0.0)) throw ParameterError("PpoConfig: max_grad_norm must be positive");
  if (!(adam_eps > 0.0)) throw ParameterError("PpoConfig: adam_eps must be positive");
  if (total_timesteps < 0) throw ParameterError("PpoConfig: negative total_timesteps");
}

PpoConfig PpoConfig::defaults_for(Scenario s) {
  PpoConfig cfg;
  cfg.learning_rate = s == Scenario::kQomdp ? 3e-4 : 1e-4;
  return cfg;
}

RolloutBuffer::RolloutBuffer(int capacity, int obs_dim, int memory_size)
    : capacity_(capacity), obs_(Matrix::Zero(obs_dim, capacity)) {
  if (capacity < 1) throw ParameterError("RolloutBuffer: capacity must be positive");
  if (obs_dim < 1) throw ParameterError("RolloutBuffer: obs_dim must be positive");
  const auto n = static_cast<std::size_t>(capacity);
  pre_squash_.reserve(n);
  stop_.reserve(n);
  log_prob_.reserve(n);
  reward_.reserve(n);
  value_.reserve(n);
  done_.reserve(n);
  episode_start_.reserve(n);
  memory_.reserve(memory_size > 0 ? n : 0);
}

void RolloutBuffer::add(const Vector& obs, double pre_squash, bool stop, double log_prob,
                        double reward, double value, bool done, bool episode_start,
                        const std::vector<double>& memory) {
  if (full()) throw ContractViolation("RolloutBuffer: add on a full buffer");
  if (obs.size() != obs_.rows()) throw DimensionError("RolloutBuffer: observation size");
  obs_.col(size_) = obs;
  pre_squash_.push_back(pre_squash);
  stop_.push_back(stop ? 1.0 : 0.0);
  log_prob_.push_back(log_prob);
  reward_.push_back(reward);
  value_.push_back(value);
  done_.push_back(done ? 1.0 : 0.0);
  episode_start_.push_back(episode_start);
  memory_.push_back(memory);
  ++size_;
  advantages_.clear();
  returns_.clear();
}

void RolloutBuffer::clear() {
  size_ = 0;
  pre_squash_.clear();
  stop_.clear();
  log_prob_.clear();
  reward_.clear();
  value_.clear();
  done_.clear();
  episode_start_.clear();
  memory_.clear();
  advantages_.clear();
  returns_.clear();
  bootstrap_value_ = 0.0;
}

std::vector<std::pair<int, int>> RolloutBuffer::sequences() const {
  std::vector<std::pair<int, int>> out;
  int begin = 0;
  for (int i = 1; i < size_; ++i) {
    if (episode_start_[i]) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  if (size_ > 0) out.emplace_back(begin, size_);
  return out;
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const double> dones, double bootstrap_value, double gamma,
                      double lambda) {
  const std::size_t n = rewards.size();
  if (n == 0) throw ContractViolation("compute_gae: empty rollout");
  if (values.size() != n || dones.size() != n) {
    throw DimensionError("compute_gae: rewards, values and dones differ in length");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double next_value = (k + 1 < n) ? values[k + 1] : bootstrap_value;
    const double live = 1.0 - dones[k];
    const double delta = rewards[k] + gamma * live * next_value - values[k];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
  }
  return out;
}

void compute_gae(RolloutBuffer& buffer, double gamma, double lambda) {
  if (!buffer.full()) throw ContractViolation("compute_gae: buffer is not full");
  GaeResult r = compute_gae(buffer.rewards(), buffer.values(), buffer.dones(),
                            buffer.bootstrap_value(), gamma, lambda);
  buffer.advantages() = std::move(r.advantages);
  buffer.returns() = std::move(r.returns);
}

Batch make_batch(const ActorCritic& model, const RolloutBuffer& buffer,
                 const std::vector<int>& rows) {
  Batch batch;
  batch.obs.resize(buffer.obs_dim(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const int r = rows[j];
    if (r < 0 || r >= buffer.size()) throw DimensionError("make_batch: row out of range");
    batch.obs.col(static_cast<Eigen::Index>(j)) = buffer.observations().col(r);
  }
  if (!model.recurrent()) return batch;
  const int hidden = model.arch().lstm_hidden;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const int r = rows[j];
    const bool boundary = j == 0 || r == 0 || buffer.episode_starts()[r] || rows[j - 1] != r - 1;
    if (!boundary) continue;
    batch.starts.push_back(static_cast<int>(j));
    LstmState pi, vf;
    ActorCritic::unpack_memory(buffer.memory_at(r), hidden, pi, vf);
    batch.pi_init.push_back(std::move(pi));
    batch.vf_init.push_back(std::move(vf));
  }
  return batch;
}

LossTerms ppo_loss(const ActorCritic& model, const RolloutBuffer& buffer,
                   const std::vector<int>& rows, const PpoConfig& cfg, NetworkParams* grad) {
  if (!buffer.has_advantages()) throw ContractViolation("ppo_loss: advantages not computed");
  if (rows.empty()) throw ContractViolation("ppo_loss: empty minibatch");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> adv(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) adv[j] = buffer.advantages()[rows[j]];
  if (cfg.normalize_advantage && rows.size() > 1) {
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) * inv_n;
    double ss = 0.0;
    for (double a : adv) ss += (a - mean) * (a - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double denom = std::max(sd, 1e-8);
    for (double& a : adv) a = (a - mean) / denom;
  }

  const Batch batch = make_batch(model, buffer, rows);
  ForwardTape tape;
  const Heads heads = model.forward(batch, grad ? &tape : nullptr);

  const double raw_log_std = model.log_std();
  const double log_std = std::clamp(raw_log_std, kLogStdMin, kLogStdMax);
  const bool log_std_free = raw_log_std > kLogStdMin && raw_log_std < kLogStdMax;
  const double inv_var = std::exp(-2.0 * log_std);
  const bool has_stop = model.arch().stop_head;

  HeadGrads g;
  g.d_mean = RowVector::Zero(n);
  g.d_value = RowVector::Zero(n);
  if (has_stop) g.d_stop = RowVector::Zero(n);

  LossTerms out;
  out.ratios.resize(rows.size());
  double d_logstd = 0.0;
  double entropy_sum = 0.0;
  const double lo = 1.0 - cfg.clip_range;
  const double hi = 1.0 + cfg.clip_range;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int r = rows[static_cast<std::size_t>(j)];
    const ActionDistribution dist = model.distribution(heads, j);
    const double u = buffer.pre_squash()[r];
    const bool stop = buffer.stops()[r] > 0.5;
    const double logp = log_prob(dist, u, stop);
    const double log_ratio = logp - buffer.log_probs()[r];
    const double ratio = std::exp(log_ratio);
    out.ratios[static_cast<std::size_t>(j)] = ratio;
    const double a = adv[static_cast<std::size_t>(j)];
    const double surr1 = ratio * a;
    const double clipped = std::clamp(ratio, lo, hi);
    const double surr2 = clipped * a;
    out.policy_loss -= std::min(surr1, surr2) * inv_n;
    if (std::abs(ratio - 1.0) > cfg.clip_range) out.clip_fraction += inv_n;
    out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;

    // d(policy loss)/d logp.
    const bool through = surr1 <= surr2 || (ratio >= lo && ratio <= hi);
    const double d_logp = through ? -ratio * a * inv_n : 0.0;

    const double z = u - dist.mean;
    g.d_mean[j] = d_logp * z * inv_var;
    d_logstd += d_logp * (z * z * inv_var - 1.0);

    double entropy = gaussian_entropy(log_std);
    d_logstd -= cfg.ent_coef * inv_n;  // d(-c H)/d log_std
    if (has_stop) {
      const double x = *dist.stop_logit;
      const double p = sigmoid(x);
      entropy += bernoulli_entropy(x);
      g.d_stop[j] = d_logp * ((stop ? 1.0 : 0.0) - p) + cfg.ent_coef * inv_n * x * p * (1.0 - p);
    }
    entropy_sum += entropy;

    const double err = heads.value[j] - buffer.returns()[r];
    out.value_loss += err * err * inv_n;
    g.d_value[j] = cfg.vf_coef * 2.0 * err * inv_n;
  }
  out.entropy = entropy_sum * inv_n;
  out.loss = out.policy_loss + cfg.vf_coef * out.value_loss - cfg.ent_coef * out.entropy;
  g.d_log_std = log_std_free ? d_logstd : 0.0;

  if (grad) model.backward(batch, tape, g, *grad);
  return out;
}

std::vector<std::vector<int>> make_minibatches(const ActorCritic& model,
                                               const RolloutBuffer& buffer, int batch_size,
                                               RngStream& rng) {
  std::vector<std::vector<int>> batches;
  if (!model.recurrent()) {
    std::vector<int> perm(static_cast<std::size_t>(buffer.size()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    for (std::size_t b = 0; b < perm.size(); b += static_cast<std::size_t>(batch_size)) {
      const std::size_t e = std::min(perm.size(), b + static_cast<std::size_t>(batch_size));
      batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(b),
                           perm.begin() + static_cast<std::ptrdiff_t>(e));
    }
    return batches;
  }
  auto seqs = buffer.sequences();
  std::shuffle(seqs.begin(), seqs.end(), rng.engine());
  std::vector<int> current;
  for (const auto& [begin, end] : seqs) {
    const int len = end - begin;
    if (!current.empty() && static_cast<int>(current.size()) + len > batch_size) {
      batches.push_back(std::move(current));
      current.clear();
    }
    for (int r = begin; r < end; ++r) current.push_back(r);
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

UpdateStats ppo_update(ActorCritic& model, Adam& optimizer, const RolloutBuffer& buffer,
                       const PpoConfig& cfg, RngStream& rng) {
  if (!buffer.full() || !buffer.has_advantages()) {
    throw ContractViolation("ppo_update: needs a full buffer with advantages");
  }
  UpdateStats stats;
  double pl = 0.0, vl = 0.0, ent = 0.0, cf = 0.0, kl = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& rows : make_minibatches(model, buffer, cfg.batch_size, rng)) {
      NetworkParams grad = NetworkParams::zeros(model.arch());
      const LossTerms terms = ppo_loss(model, buffer, rows, cfg, &grad);
      Vector flat_grad = grad.flatten();
      if (!std::isfinite(terms.loss) || !flat_grad.allFinite()) {
        std::ostringstream msg;
        msg << "ppo_update: non-finite loss at epoch " << epoch << " (policy "
            << terms.policy_loss << ", value " << terms.value_loss << ", entropy "
            << terms.entropy << ", log_std " << model.log_std() << ")";
        throw TrainingError(msg.str());
      }
      clip_grad_norm(flat_grad, cfg.max_grad_norm);
      Vector flat = model.params().flatten();
      optimizer.step(flat, flat_grad);
      NetworkParams& p = model.mutable_params();
      p.unflatten(flat);
      p.log_std = std::clamp(p.log_std, kLogStdMin, kLogStdMax);
      pl += terms.policy_loss;
      vl += terms.value_loss;
      ent += terms.entropy;
      cf += terms.clip_fraction;
      kl += terms.approx_kl;
      ++stats.gradient_steps;
    }
  }
  if (stats.gradient_steps > 0) {
    const double k = 1.0 / stats.gradient_steps;
    stats.policy_loss = pl * k;
    stats.value_loss = vl * k;
    stats.entropy = ent * k;
    stats.clip_fraction = cf * k;
    stats.approx_kl = kl * k;
  }
  return stats;
}

}  // namespace qfc::rl
