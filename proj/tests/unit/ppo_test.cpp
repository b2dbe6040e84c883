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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "qfc/errors.hpp"
#include "qfc/rl/ppo.hpp"
#include "qfc/rl/train.hpp"
#include "ppo_checks.hpp"

namespace qfc::rl {
namespace {

using checks::all_rows;
using checks::loss_gradient;
using checks::random_buffer;
using checks::relative_error;
using checks::toy_arch;
using checks::finite_difference_gradient;

TEST(Gae, HandComputedThreeSteps) {
  const std::vector<double> r{1.0, 2.0, 3.0}, v{0.5, 0.5, 0.5}, d{0.0, 0.0, 0.0};
  const GaeResult g = compute_gae(r, v, d, 1.0, 0.9, 0.8);
  EXPECT_NEAR(g.advantages[2], 3.4, 1e-12);
  EXPECT_NEAR(g.advantages[1], 4.398, 1e-12);
  EXPECT_NEAR(g.advantages[0], 4.11656, 1e-12);
  for (int t = 0; t < 3; ++t) EXPECT_NEAR(g.returns[t], g.advantages[t] + 0.5, 1e-12);
}

TEST(Gae, LambdaZeroIsTdError) {
  const std::vector<double> r{1.0, 0.0, 2.0}, v{0.3, -0.2, 0.7}, d{0.0, 1.0, 0.0};
  const GaeResult g = compute_gae(r, v, d, 0.4, 0.9, 0.0);
  EXPECT_NEAR(g.advantages[0], 1.0 + 0.9 * -0.2 - 0.3, 1e-15);
  EXPECT_NEAR(g.advantages[1], 0.0 - -0.2, 1e-15);
  EXPECT_NEAR(g.advantages[2], 2.0 + 0.9 * 0.4 - 0.7, 1e-15);
}

TEST(Gae, LambdaOneIsMonteCarloReturn) {
  const std::vector<double> r{1.0, 2.0, 3.0, 4.0}, v{0.1, 0.2, 0.3, 0.4}, d{0.0, 1.0, 0.0, 1.0};
  const GaeResult g = compute_gae(r, v, d, 9.0, 0.5, 1.0);
  EXPECT_NEAR(g.returns[0], 1.0 + 0.5 * 2.0, 1e-15);
  EXPECT_NEAR(g.returns[1], 2.0, 1e-15);
  EXPECT_NEAR(g.returns[2], 3.0 + 0.5 * 4.0, 1e-15);
  EXPECT_NEAR(g.returns[3], 4.0, 1e-15);
}

TEST(Gae, MatchesBruteForceDoubleSum) {
  RngStream rng(1, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(10), v(10), d(10);
    for (int t = 0; t < 10; ++t) {
      r[t] = rng.normal();
      v[t] = rng.normal();
      d[t] = rng.uniform() < 0.25 ? 1.0 : 0.0;
    }
    const double boot = rng.normal();
    const double gamma = 0.99, lambda = 0.95;
    const GaeResult g = compute_gae(r, v, d, boot, gamma, lambda);
    const auto oracle_adv = oracle::gae_double_sum(r, v, d, boot, gamma, lambda);
    for (int t = 0; t < 10; ++t) {
      EXPECT_NEAR(g.advantages[t], oracle_adv[t], 1e-10);
      EXPECT_NEAR(g.returns[t], oracle_adv[t] + v[t], 1e-10);
    }
  }
}

TEST(Gae, BufferVersionRequiresFullBuffer) {
  RolloutBuffer buffer(4, 2, 0);
  EXPECT_THROW(compute_gae(buffer, 0.99, 0.95), ContractViolation);
  buffer.add(Vector::Zero(2), 0.0, false, 0.0, 1.0, 0.0, false, true, {});
  EXPECT_THROW(compute_gae(buffer, 0.99, 0.95), ContractViolation);
}

TEST(RolloutBuffer, SequencesSplitAtEpisodeStarts) {
  RolloutBuffer buffer(6, 1, 0);
  const bool starts[] = {false, false, true, false, true, false};
  for (bool s : starts) buffer.add(Vector::Zero(1), 0.0, false, 0.0, 0.0, 0.0, false, s, {});
  const auto seqs = buffer.sequences();
  ASSERT_EQ(seqs.size(), 3u);
  EXPECT_EQ(seqs[0], std::make_pair(0, 2));
  EXPECT_EQ(seqs[1], std::make_pair(2, 4));
  EXPECT_EQ(seqs[2], std::make_pair(4, 6));
  EXPECT_THROW(buffer.add(Vector::Zero(1), 0.0, false, 0.0, 0.0, 0.0, false, false, {}),
               ContractViolation);
}

void check_gradient(bool recurrent, double ent_coef) {
  EXPECT_LE(checks::gradient_relative_error(recurrent, ent_coef), 1e-4);
}

TEST(PpoGradient, FeedForwardMatchesFiniteDifferences) { check_gradient(false, 0.0); }
TEST(PpoGradient, FeedForwardWithEntropyMatchesFiniteDifferences) { check_gradient(false, 0.01); }
TEST(PpoGradient, RecurrentStopHeadMatchesFiniteDifferences) { check_gradient(true, 0.02); }

TEST(PpoGradient, SubsetOfSequencesMatchesFiniteDifferences) {
  ActorCritic model(toy_arch(true), 13);
  RngStream rng(14, 0);
  const RolloutBuffer buffer = random_buffer(model, 30, rng, 0.05);
  RngStream shuffle(15, 0);
  const auto batches = make_minibatches(model, buffer, 8, shuffle);
  ASSERT_GE(batches.size(), 2u);
  PpoConfig cfg;
  const Vector analytic = loss_gradient(model, buffer, batches[0], cfg);
  const Vector numeric = finite_difference_gradient(model, buffer, batches[0], cfg, 1e-5);
  EXPECT_LE(relative_error(analytic, numeric), 1e-4);
}

TEST(PpoLoss, RatioIsOneForCurrentPolicy) {
  for (bool recurrent : {false, true}) {
    ActorCritic model(toy_arch(recurrent), 16);
    RngStream rng(17, 0);
    const RolloutBuffer buffer = random_buffer(model, 40, rng, 0.0);
    const LossTerms t = ppo_loss(model, buffer, all_rows(40), PpoConfig{}, nullptr);
    for (double r : t.ratios) EXPECT_NEAR(r, 1.0, 1e-12);
    EXPECT_EQ(t.clip_fraction, 0.0);
    EXPECT_NEAR(t.approx_kl, 0.0, 1e-12);
  }
}

TEST(PpoLoss, UnitRatioGradientIsVanillaPolicyGradient) {
  ActorCritic model(toy_arch(true), 18);
  RngStream rng(19, 0);
  const RolloutBuffer buffer = random_buffer(model, 20, rng, 0.0);
  PpoConfig cfg;
  cfg.vf_coef = 0.0;
  cfg.normalize_advantage = false;
  const std::vector<int> rows = all_rows(20);
  const Vector ppo = loss_gradient(model, buffer, rows, cfg);

  // -mean(A log pi) differentiated numerically through the model.
  auto objective = [&](const ActorCritic& m) {
    const Batch batch = make_batch(m, buffer, rows);
    const Heads heads = m.forward(batch, nullptr);
    double s = 0.0;
    for (int j = 0; j < 20; ++j) {
      s -= buffer.advantages()[j] *
           log_prob(m.distribution(heads, j), buffer.pre_squash()[j], buffer.stops()[j] > 0.5);
    }
    return s / 20.0;
  };
  ActorCritic probe(model.arch(), model.params());
  const Vector base = model.params().flatten();
  Vector numeric(base.size());
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    Vector p = base;
    p[i] += 1e-6;
    probe.mutable_params().unflatten(p);
    const double up = objective(probe);
    p[i] -= 2e-6;
    probe.mutable_params().unflatten(p);
    numeric[i] = (up - objective(probe)) / 2e-6;
  }
  EXPECT_LE(relative_error(ppo, numeric), 1e-5);
}

TEST(PpoLoss, ZeroAdvantagesGiveZeroPolicyGradient) {
  ActorCritic model(toy_arch(false), 20);
  RngStream rng(21, 0);
  RolloutBuffer buffer = random_buffer(model, 16, rng, 0.1);
  std::fill(buffer.advantages().begin(), buffer.advantages().end(), 0.0);
  PpoConfig cfg;
  cfg.vf_coef = 0.0;
  const Vector g = loss_gradient(model, buffer, all_rows(16), cfg);
  EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(PpoLoss, RequiresAdvantages) {
  ActorCritic model(toy_arch(false), 22);
  RolloutBuffer buffer(2, 3, 0);
  buffer.add(Vector::Zero(3), 0.0, false, 0.0, 0.0, 0.0, false, true, {});
  buffer.add(Vector::Zero(3), 0.0, false, 0.0, 0.0, 0.0, false, false, {});
  EXPECT_THROW(ppo_loss(model, buffer, {0, 1}, PpoConfig{}, nullptr), ContractViolation);
}

TEST(Minibatches, FeedForwardPartitionsRows) {
  ActorCritic model(toy_arch(false), 23);
  RngStream rng(24, 0);
  const RolloutBuffer buffer = random_buffer(model, 50, rng, 0.0);
  const auto batches = make_minibatches(model, buffer, 16, rng);
  ASSERT_EQ(batches.size(), 4u);
  std::vector<int> seen(50, 0);
  for (const auto& b : batches)
    for (int r : b) ++seen[r];
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(Minibatches, RecurrentKeepsSequencesWhole) {
  ActorCritic model(toy_arch(true), 25);
  RngStream rng(26, 0);
  const RolloutBuffer buffer = random_buffer(model, 60, rng, 0.0);
  const auto batches = make_minibatches(model, buffer, 10, rng);
  std::vector<int> seen(60, 0);
  for (const auto& b : batches) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      ++seen[b[i]];
      // Within a batch a row is either a sequence start or follows its predecessor.
      if (!buffer.episode_starts()[b[i]] && b[i] != 0) {
        ASSERT_GT(i, 0u);
        EXPECT_EQ(b[i - 1], b[i] - 1);
      }
    }
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(PpoUpdate, ClampsLogStdAndStaysFinite) {
  ActorCritic model(toy_arch(false), 27);
  model.mutable_params().log_std = 1.99;
  RngStream rng(28, 0);
  const RolloutBuffer buffer = random_buffer(model, 64, rng, 0.2);
  PpoConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 16;
  cfg.ent_coef = 10.0;
  Adam adam(model.params().size(), cfg.learning_rate);
  const UpdateStats stats = ppo_update(model, adam, buffer, cfg, rng);
  EXPECT_EQ(stats.gradient_steps, cfg.epochs * 4);
  EXPECT_LE(model.log_std(), kLogStdMax);
  EXPECT_TRUE(model.params().flatten().allFinite());
}

TEST(PpoConfig, Validation) {
  PpoConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gamma = 1.5;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = PpoConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  EXPECT_EQ(PpoConfig::defaults_for(Scenario::kQomdp).learning_rate, 3e-4);
  EXPECT_EQ(PpoConfig::defaults_for(Scenario::kMbs).learning_rate, 1e-4);
}

TEST(PpoBandit, ConvergesOnThreeSeeds) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    EXPECT_GE(checks::bandit_good_arm_probability(seed), 0.95) << "seed " << seed;
  }
}

// The first observation carries a bit that must be reported after two
// uninformative steps.
class ParityEnv final : public TrainingEnv {
 public:
  ObservationKind observation_kind() const override { return ObservationKind::kOutcomePair; }
  Observation reset(RngStream& rng) override {
    bit_ = rng.uniform() < 0.5 ? 0 : 2;
    t_ = 0;
    return OutcomePair{bit_, 0.0};
  }
  EnvStep step(const ControlAction& a, RngStream&) override {
    ++t_;
    if (t_ < 3) return {OutcomePair{1, 0.0}, 0.0, false};
    const bool right = (a.beta > 0.0) == (bit_ == 2);
    return {OutcomePair{1, 0.0}, right ? 1.0 : 0.0, true};
  }

 private:
  int bit_ = 0;
  int t_ = 0;
};

double parity_accuracy(const Policy& policy, int episodes) {
  ParityEnv env;
  RngStream rng(99, 0);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    PolicySession s(policy);
    Observation obs = env.reset(rng);
    for (;;) {
      const EnvStep st = env.step(s.act(obs, rng), rng);
      obs = st.observation;
      if (st.done) {
        total += st.reward;
        break;
      }
    }
  }
  return total / episodes;
}

TEST(PpoRecurrent, RemembersTheFirstObservation) {
  ArchConfig arch;
  arch.observation_kind = ObservationKind::kOutcomePair;
  arch.obs_dim = 2;
  arch.hidden = {16};
  arch.lstm_hidden = 16;
  PpoConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.n_steps = 256;
  cfg.batch_size = 64;
  cfg.total_timesteps = 30000;
  ParityEnv env;
  const TrainResult r = train_on_env(env, arch, cfg, 5);
  EXPECT_GE(parity_accuracy(r.policy, 400), 0.7);
}

}  // namespace
}  // namespace qfc::rl
