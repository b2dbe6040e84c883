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

#include <memory>

#include "qfc/dynamics.hpp"
#include "qfc/errors.hpp"
#include "qfc/rl/actor_critic.hpp"
#include "test_util.hpp"

namespace qfc {
namespace {

EnvConfig make_cfg(NoiseKind noise, double alpha, double eps) {
  EnvConfig cfg;
  cfg.noise = noise;
  cfg.alpha = alpha;
  cfg.epsilon = eps;
  return cfg;
}

// Binomial 3-sigma check of empirical frequencies.
void expect_frequencies(const std::vector<int>& counts, const std::vector<double>& p, int n) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double sigma = std::sqrt(p[k] * (1.0 - p[k]) / n);
    EXPECT_NEAR(static_cast<double>(counts[k]) / n, p[k], 3.0 * sigma + 1e-12) << "outcome " << k;
  }
}

Policy random_state_policy(std::uint64_t seed) {
  auto model = std::make_shared<rl::ActorCritic>(rl::ArchConfig::feed_forward(), seed);
  return Policy(Stochastic{model, false}, "random");
}

TEST(EnvConfigTest, Validation) {
  EnvConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.horizon = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = EnvConfig{};
  cfg.epsilon = 0.4;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = EnvConfig{};
  cfg.alpha = 1.5;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = EnvConfig{};
  cfg.target_index = 3;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(StepTrue, TargetIsFixedPoint) {
  const SystemModel model(make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0));
  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    const StepResult r = step_true(model, DensityOperator::basis(3, 2), 0.0, rng);
    EXPECT_EQ(r.outcome, 2);
    EXPECT_LE(max_abs_diff(r.state.matrix(), DensityOperator::basis(3, 2).matrix()), 1e-15);
  }
}

TEST(StepTrue, OutcomeFrequenciesFromGroundState) {
  const SystemModel model(make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0));
  RngStream rng(2, 0);
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[step_true(model, DensityOperator::basis(3, 0), 1.0, rng).outcome];
  std::vector<double> p;
  for (int k = 0; k < 3; ++k) p.push_back(std::norm(oracle::control_unitary(1.0)[k][0]));
  EXPECT_NEAR(p[0], 0.33405, 5e-6);
  EXPECT_NEAR(p[1], 0.48784, 5e-6);
  EXPECT_NEAR(p[2], 0.17811, 5e-6);
  expect_frequencies(counts, p, n);
}

TEST(StepTrue, FullDepolarizingGivesUniformOutcomes) {
  const SystemModel model(make_cfg(NoiseKind::kDepolarizing, 1.0, 0.1));
  RngStream rng(3, 0);
  const int n = 30000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) {
    ++counts[step_true(model, testing::random_state(rng), 0.0, rng).outcome];
  }
  expect_frequencies(counts, {1.0 / 3, 1.0 / 3, 1.0 / 3}, n);
}

TEST(StepNominal, CoincidesWithStepTrueAtZeroNoise) {
  const SystemModel model(make_cfg(NoiseKind::kRandomPermutation, 0.0, 0.15));
  RngStream a(4, 0), b(4, 0), states(5, 0);
  for (int i = 0; i < 100; ++i) {
    const DensityOperator rho = testing::random_state(states);
    const StepResult x = step_true(model, rho, 0.3, a);
    const StepResult y = step_nominal(model, rho, 0.3, b);
    EXPECT_EQ(x.outcome, y.outcome);
    EXPECT_EQ(max_abs_diff(x.state.matrix(), y.state.matrix()), 0.0);
  }
}

TEST(StepNominal, IgnoresNoise) {
  const SystemModel noisy(make_cfg(NoiseKind::kDepolarizing, 0.8, 0.1));
  const SystemModel clean(make_cfg(NoiseKind::kDepolarizing, 0.0, 0.1));
  RngStream a(6, 0), b(6, 0);
  DensityOperator x = DensityOperator::basis(3, 0), y = x;
  for (int t = 0; t < 20; ++t) {
    const StepResult r1 = step_nominal(noisy, x, 0.7, a);
    const StepResult r2 = step_nominal(clean, y, 0.7, b);
    ASSERT_EQ(r1.outcome, r2.outcome);
    EXPECT_EQ(max_abs_diff(r1.state.matrix(), r2.state.matrix()), 0.0);
    x = r1.state;
    y = r2.state;
  }
}

TEST(StepNominal, OutcomeStatistics) {
  const SystemModel model(make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0));
  RngStream rng(7, 0);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += step_nominal(model, DensityOperator::basis(3, 1), 1.0, rng).outcome == 2;
  const double p = std::norm(oracle::control_unitary(1.0)[2][1]);
  EXPECT_NEAR(p, 0.48784, 5e-6);
  EXPECT_NEAR(static_cast<double>(hits) / n, p, 3.0 * std::sqrt(p * (1 - p) / n));

  const double eps = 0.2;
  const SystemModel noisy_meas(make_cfg(NoiseKind::kDepolarizing, 0.0, eps));
  hits = 0;
  for (int i = 0; i < n; ++i) {
    hits += step_nominal(noisy_meas, DensityOperator::basis(3, 2), 0.0, rng).outcome == 2;
  }
  const double q = 1.0 - 2.0 * eps;
  EXPECT_NEAR(static_cast<double>(hits) / n, q, 3.0 * std::sqrt(q * (1 - q) / n));
}

TEST(FilterUpdate, Examples) {
  const SystemModel model(make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0));
  const DensityOperator target = DensityOperator::basis(3, 2);
  EXPECT_LE(max_abs_diff(filter_update(model, target, 0.0, 2).matrix(), target.matrix()), 1e-15);
  EXPECT_LE(max_abs_diff(filter_update(model, DensityOperator::basis(3, 0), 1.0, 2).matrix(),
                         target.matrix()),
            1e-12);
}

TEST(FilterUpdate, IncompatibleOutcomeDiverges) {
  const SystemModel model(make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0));
  EXPECT_THROW(filter_update(model, DensityOperator::basis(3, 2), 0.0, 0), FilterDivergence);
}

TEST(FilterUpdate, TracksTruthWithoutNoise) {
  const SystemModel model(make_cfg(NoiseKind::kAmplitudeDamping, 0.0, 0.2));
  RngStream rng(8, 0);
  DensityOperator rho = testing::random_state(rng), est = rho;
  for (int t = 0; t < 200; ++t) {
    const double beta = 2.0 * rng.uniform() - 1.0;
    const StepResult r = step_true(model, rho, beta, rng);
    rho = r.state;
    est = filter_update(model, est, beta, r.outcome);
    EXPECT_LE(max_abs_diff(rho.matrix(), est.matrix()), 1e-12);
  }
}

TEST(RunEpisode, BasicPolicyNoiselessReachesTarget) {
  const EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0);
  int successes = 0;
  for (int e = 0; e < 1000; ++e) {
    RngStream rng(9, static_cast<std::uint64_t>(e));
    const EpisodeTrace tr = run_episode(basic_policy(), cfg, rng, ObservationMode::kOutcomeHistory);
    successes += tr.terminal_fidelity > 1.0 - 1e-9;
  }
  EXPECT_GE(successes, 990);
}

TEST(RunEpisode, ZeroPolicyNeverMoves) {
  const EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0);
  for (int e = 0; e < 50; ++e) {
    RngStream rng(10, static_cast<std::uint64_t>(e));
    const EpisodeTrace tr =
        run_episode(constant_policy(0.0), cfg, rng, ObservationMode::kOutcomeHistory);
    EXPECT_EQ(tr.terminal_fidelity, 0.0);
    EXPECT_EQ(tr.steps.size(), 20u);
  }
}

TEST(RunEpisode, FullDepolarizingGivesOneThird) {
  const EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 1.0, 0.1);
  double sum = 0.0;
  for (int e = 0; e < 1000; ++e) {
    RngStream rng(11, static_cast<std::uint64_t>(e));
    sum += run_episode(basic_policy(), cfg, rng, ObservationMode::kOutcomeHistory).terminal_fidelity;
  }
  EXPECT_NEAR(sum / 1000.0, 1.0 / 3.0, 0.02);
}

TEST(RunEpisode, RecordsAreContiguousAndConsistent) {
  const EnvConfig cfg = make_cfg(NoiseKind::kRandomPermutation, 0.3, 0.1);
  RngStream rng(12, 0);
  const EpisodeTrace tr = run_episode(random_state_policy(3), cfg, rng, ObservationMode::kFilteredState);
  ASSERT_EQ(tr.steps.size(), static_cast<std::size_t>(cfg.horizon));
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const StepRecord& s = tr.steps[i];
    EXPECT_EQ(s.t, static_cast<int>(i) + 1);
    EXPECT_TRUE(s.aux_state.has_value());
    EXPECT_NEAR(s.fidelity_true, fidelity_pure_target(s.true_state, 2), 1e-9);
    EXPECT_TRUE(validate_density(s.true_state.matrix()).ok);
    EXPECT_LE(std::abs(s.beta), 1.0);
  }
  const auto curve = tr.fidelity_curve();
  EXPECT_EQ(curve.size(), 21u);
  EXPECT_EQ(curve.back(), tr.terminal_fidelity);
}

TEST(RunEpisode, IsReproducible) {
  const EnvConfig cfg = make_cfg(NoiseKind::kAmplitudeDamping, 0.4, 0.2);
  const Policy p = random_state_policy(4);
  RngStream a(13, 5), b(13, 5);
  const EpisodeTrace x = run_episode(p, cfg, a, ObservationMode::kFilteredState);
  const EpisodeTrace y = run_episode(p, cfg, b, ObservationMode::kFilteredState);
  ASSERT_EQ(x.steps.size(), y.steps.size());
  for (std::size_t i = 0; i < x.steps.size(); ++i) {
    EXPECT_EQ(x.steps[i].beta, y.steps[i].beta);
    EXPECT_EQ(x.steps[i].outcome, y.steps[i].outcome);
    EXPECT_EQ(max_abs_diff(x.steps[i].true_state.matrix(), y.steps[i].true_state.matrix()), 0.0);
  }
}

TEST(RunEpisode, ModeMismatchIsAContractViolation) {
  const EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 0.0, 0.1);
  RngStream rng(14, 0);
  EXPECT_THROW(run_episode(basic_policy(), cfg, rng, ObservationMode::kFilteredState),
               ContractViolation);
  EXPECT_THROW(run_episode(random_state_policy(1), cfg, rng, ObservationMode::kOutcomeHistory),
               ContractViolation);
}

TEST(RunEpisode, TargetStartHasZeroStepsToThreshold) {
  EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 0.0, 0.0);
  cfg.initial_state = DensityOperator::basis(3, 2);
  RngStream rng(15, 0);
  const EpisodeTrace tr = run_episode(basic_policy(), cfg, rng, ObservationMode::kOutcomeHistory);
  EXPECT_EQ(tr.initial_fidelity, 1.0);
  EXPECT_EQ(tr.fidelity_curve().front(), 1.0);
}

TEST(EstimateAverageState, ZeroControlKeepsBasisState) {
  const EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 0.0, 0.25);
  const DensityOperator avg = estimate_average_state(constant_policy(0.0), cfg, 200, RngStream(16, 0));
  EXPECT_LE(max_abs_diff(avg.matrix(), DensityOperator::basis(3, 0).matrix()), 1e-12);
}

TEST(EstimateAverageState, OneDepolarizingStepWithinThreeSigma) {
  EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 0.5, 0.1);
  cfg.horizon = 1;
  const int n = 20000;
  const DensityOperator avg = estimate_average_state(constant_policy(0.0), cfg, n, RngStream(17, 0));
  // 0.5 I/3 + 0.5 |0><0| = diag(2/3, 1/6, 1/6); measurement averaging keeps
  // diagonal states fixed. Per-episode final populations are bounded in
  // [0, 1], so sigma <= 0.5/sqrt(n).
  const double expected[3] = {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(avg.population(k), expected[k], 3.0 * 0.5 / std::sqrt(n));
  }
}

TEST(EstimateAverageState, MatchesDeterministicIterationOpenLoop) {
  EnvConfig cfg = make_cfg(NoiseKind::kDepolarizing, 0.0, 0.1);
  cfg.horizon = 2;
  const int n = 20000;
  const DensityOperator avg = estimate_average_state(constant_policy(1.0), cfg, n, RngStream(18, 0));
  oracle::Mat3 rho = testing::to_oracle(DensityOperator::basis(3, 0).matrix());
  for (int t = 0; t < 2; ++t) rho = oracle::averaged_depolarizing_step(rho, 0.0, 1.0, 0.1);
  EXPECT_LE(testing::max_diff(rho, avg.matrix()), 4.0 / std::sqrt(n));
}

TEST(RandomPureState, IsValidAndPure) {
  RngStream rng(19, 0);
  for (int i = 0; i < 50; ++i) {
    const DensityOperator psi = random_pure_state(rng);
    EXPECT_NEAR((psi.matrix() * psi.matrix()).trace().real(), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace qfc
