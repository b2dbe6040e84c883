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

#include <benchmark/benchmark.h>

#include "ppo_checks.hpp"
#include "qfc/dynamics.hpp"
#include "qfc/qcore.hpp"
#include "qfc/rl/actor_critic.hpp"
#include "qfc/rl/nn.hpp"
#include "qfc/rl/ppo.hpp"

namespace {

using namespace qfc;

void BM_StepTrue(benchmark::State& state) {
  EnvConfig env;
  env.alpha = 0.3;
  env.epsilon = 0.1;
  const SystemModel model(env);
  RngStream rng(1, 0);
  DensityOperator rho = env.initial_state;
  for (auto _ : state) {
    StepResult r = step_true(model, rho, 0.7, rng);
    rho = r.outcome == 2 ? env.initial_state : r.state;
    benchmark::DoNotOptimize(rho);
  }
}
BENCHMARK(BM_StepTrue);

void BM_Fidelity(benchmark::State& state) {
  EnvConfig env;
  env.alpha = 0.5;
  const SystemModel model(env);
  RngStream rng(2, 0);
  const DensityOperator a = step_true(model, env.initial_state, 0.4, rng).state;
  const DensityOperator b = step_true(model, env.initial_state, -0.8, rng).state;
  for (auto _ : state) benchmark::DoNotOptimize(fidelity(a, b));
}
BENCHMARK(BM_Fidelity);

void BM_MatrixExponential(benchmark::State& state) {
  const ControlFamily fam = ControlFamily::standard();
  double beta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(matrix_exponential(beta * fam.generator));
    beta = beta > 0.99 ? 0.1 : beta + 0.01;
  }
}
BENCHMARK(BM_MatrixExponential);

void BM_MlpForward(benchmark::State& state) {
  const rl::Mlp mlp(9, {64, 64, 64});
  const rl::Matrix x = rl::Matrix::Random(9, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rl::mlp_forward(mlp, x, nullptr));
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(64);

void BM_PpoUpdate(benchmark::State& state) {
  rl::ActorCritic model(rl::ArchConfig::feed_forward(), 3);
  RngStream rng(4, 0);
  const rl::RolloutBuffer buffer = rl::checks::random_buffer(model, 512, rng, 0.05);
  rl::PpoConfig cfg;
  cfg.n_steps = 512;
  cfg.batch_size = 64;
  cfg.epochs = 1;
  rl::Adam adam(model.params().size(), 3e-4);
  for (auto _ : state) benchmark::DoNotOptimize(rl::ppo_update(model, adam, buffer, cfg, rng));
}
BENCHMARK(BM_PpoUpdate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
