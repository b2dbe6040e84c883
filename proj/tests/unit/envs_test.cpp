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

#include "qfc/errors.hpp"
#include "qfc/rl/envs.hpp"

namespace qfc::rl {
namespace {

EnvConfig cfg_with(NoiseKind noise, double alpha, double eps) {
  EnvConfig c;
  c.noise = noise;
  c.alpha = alpha;
  c.epsilon = eps;
  return c;
}

const DensityOperator& state_of(const Observation& obs) { return std::get<FullState>(obs).state; }

TEST(Rewards, FidelityReward) {
  const EnvConfig c;
  EXPECT_DOUBLE_EQ(mb_db_reward(DensityOperator::basis(3, 2), c), 1.0);
  EXPECT_DOUBLE_EQ(mb_db_reward(DensityOperator::basis(3, 0), c), 0.0);
  EXPECT_NEAR(mb_db_reward(DensityOperator::maximally_mixed(3), c), 1.0 / 3.0, 1e-15);
}

TEST(Rewards, QomdpReward) {
  EXPECT_EQ(qomdp_reward(true, 2, true, 2), 1.0);
  EXPECT_EQ(qomdp_reward(true, 1, true, 2), -1.0);
  EXPECT_EQ(qomdp_reward(false, std::nullopt, false, 2), 0.0);
  EXPECT_EQ(qomdp_reward(false, std::nullopt, true, 2), -1.0);
  EXPECT_THROW(qomdp_reward(true, std::nullopt, true, 2), ContractViolation);
}

TEST(Scenario, ParseAndPrint) {
  for (Scenario s : {Scenario::kMbs, Scenario::kDbs, Scenario::kQomdp}) {
    EXPECT_EQ(parse_scenario(to_string(s)), s);
  }
  EXPECT_THROW(parse_scenario("basic"), ParameterError);
  EXPECT_EQ(training_env_kind(Scenario::kDbs), EnvKind::kDbsTrain);
}

TEST(MbsEnv, ResetObservesInitialState) {
  ScenarioEnv env(EnvKind::kMbsTrain, EnvConfig{});
  RngStream rng(1, 0);
  const Observation obs = env.reset(rng);
  EXPECT_LE(max_abs_diff(state_of(obs).matrix(), DensityOperator::basis(3, 0).matrix()), 0.0);
  EXPECT_EQ(env.observation_kind(), ObservationKind::kFullState);
}

TEST(MbsEnv, IgnoresAlpha) {
  ScenarioEnv clean(EnvKind::kMbsTrain, cfg_with(NoiseKind::kDepolarizing, 0.0, 0.1));
  ScenarioEnv noisy(EnvKind::kMbsTrain, cfg_with(NoiseKind::kDepolarizing, 0.9, 0.1));
  RngStream a(2, 0), b(2, 0);
  clean.reset(a);
  noisy.reset(b);
  for (int t = 0; t < 20; ++t) {
    const ControlAction act{t % 3 == 0 ? 1.0 : -0.5, false};
    const EnvStep x = clean.step(act, a);
    const EnvStep y = noisy.step(act, b);
    EXPECT_EQ(x.reward, y.reward);
    EXPECT_EQ(x.done, y.done);
    EXPECT_EQ(max_abs_diff(state_of(x.observation).matrix(), state_of(y.observation).matrix()),
              0.0);
  }
}

TEST(MbsEnv, RewardIsObservedFidelityAndEpisodeEndsAtHorizon) {
  EnvConfig c = cfg_with(NoiseKind::kDepolarizing, 0.0, 0.1);
  c.horizon = 5;
  ScenarioEnv env(EnvKind::kMbsTrain, c);
  RngStream rng(3, 0);
  env.reset(rng);
  for (int t = 1; t <= 5; ++t) {
    const EnvStep st = env.step({1.0, false}, rng);
    EXPECT_DOUBLE_EQ(st.reward, state_of(st.observation).population(2));
    EXPECT_EQ(st.done, t == 5);
  }
  EXPECT_THROW(env.step({1.0, false}, rng), ContractViolation);
}

TEST(MbsEnv, TerminalRewardOnly) {
  EnvConfig c;
  c.horizon = 4;
  ScenarioEnv env(EnvKind::kMbsTrain, c, ObservationKind::kFullState, true);
  RngStream rng(4, 0);
  env.reset(rng);
  for (int t = 1; t <= 4; ++t) {
    const EnvStep st = env.step({1.0, false}, rng);
    if (t < 4) {
      EXPECT_EQ(st.reward, 0.0);
    } else {
      EXPECT_DOUBLE_EQ(st.reward, state_of(st.observation).population(2));
    }
  }
}

TEST(DbsEnv, FilterEqualsTruthWithoutNoise) {
  ScenarioEnv env(EnvKind::kDbsTrain, cfg_with(NoiseKind::kAmplitudeDamping, 0.0, 0.15));
  RngStream rng(5, 0);
  for (int e = 0; e < 10; ++e) {
    env.reset(rng);
    for (int t = 0; t < 20; ++t) {
      env.step({2.0 * rng.uniform() - 1.0, false}, rng);
      EXPECT_LE(max_abs_diff(env.estimate().matrix(), env.true_state().matrix()), 1e-12);
    }
  }
}

TEST(DbsEnv, NoiseSeparatesFilterFromTruth) {
  ScenarioEnv env(EnvKind::kDbsTrain, cfg_with(NoiseKind::kDepolarizing, 0.5, 0.1));
  RngStream rng(6, 0);
  env.reset(rng);
  double gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    env.step({1.0, false}, rng);
    gap = std::max(gap, max_abs_diff(env.estimate().matrix(), env.true_state().matrix()));
  }
  EXPECT_GT(gap, 1e-3);
}

TEST(QomdpEnv, ResetMeasuresAndStopReadsOut) {
  ScenarioEnv env(EnvKind::kQomdpTrain, cfg_with(NoiseKind::kDepolarizing, 0.6, 0.1));
  EXPECT_EQ(env.observation_kind(), ObservationKind::kOutcomePair);
  RngStream rng(7, 0);
  int hits = 0;
  const int n = 2000;
  for (int e = 0; e < n; ++e) {
    const Observation obs = env.reset(rng);
    EXPECT_EQ(std::get<OutcomePair>(obs).last_beta, 0.0);
    EXPECT_EQ(env.steps_taken(), 0);
    const EnvStep st = env.step({0.3, true}, rng);
    EXPECT_TRUE(st.done);
    ASSERT_TRUE(env.last_readout().has_value());
    EXPECT_EQ(st.reward, *env.last_readout() == 2 ? 1.0 : -1.0);
    hits += *env.last_readout() == 2;
  }
  // The state starts at |0>, alpha is forced to zero and an eps-measurement
  // of |0> leaves it at |0>, so the readout never hits the target.
  EXPECT_EQ(hits, 0);
}

TEST(QomdpEnv, TimeoutPenalty) {
  EnvConfig c;
  c.horizon = 3;
  ScenarioEnv env(EnvKind::kQomdpTrain, c);
  RngStream rng(8, 0);
  env.reset(rng);
  EXPECT_EQ(env.step({0.5, false}, rng).reward, 0.0);
  EXPECT_EQ(env.step({0.5, false}, rng).reward, 0.0);
  const EnvStep last = env.step({0.5, false}, rng);
  EXPECT_TRUE(last.done);
  EXPECT_EQ(last.reward, -1.0);
  EXPECT_EQ(std::get<OutcomePair>(last.observation).last_beta, 0.5);
}

TEST(ValidationEnv, RewardsTrueFidelity) {
  ScenarioEnv env(EnvKind::kValidation, cfg_with(NoiseKind::kRandomPermutation, 0.3, 0.1));
  RngStream rng(9, 0);
  env.reset(rng);
  for (int t = 0; t < 20; ++t) {
    const EnvStep st = env.step({0.8, false}, rng);
    EXPECT_DOUBLE_EQ(st.reward, env.true_state().population(2));
  }
}

TEST(ScenarioEnvTest, RejectsOutOfRangeAction) {
  ScenarioEnv env(EnvKind::kMbsTrain, EnvConfig{});
  RngStream rng(10, 0);
  env.reset(rng);
  EXPECT_THROW(env.step({1.5, false}, rng), ContractViolation);
}

}  // namespace
}  // namespace qfc::rl
