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

// qfc: train agents, evaluate policies, run sweeps and render reports.
//
// Exit codes: 0 success, 1 configuration error, 2 missing checkpoint,
// 3 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "qfc/errors.hpp"
#include "qfc/harness.hpp"
#include "qfc/rl/checkpoint.hpp"
#include "qfc/rl/train.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitMissingCheckpoint = 2;
constexpr int kExitRuntime = 3;

struct EnvArgs {
  std::string noise = "depolarizing";
  double alpha = 0.0;
  double epsilon = 0.1;
  int horizon = qfc::kDefaultHorizon;

  void add_to(CLI::App* app) {
    app->add_option("--noise", noise, "depolarizing | amplitude_damping | random_permutation");
    app->add_option("--alpha", alpha, "noise strength in [0, 1]");
    app->add_option("--epsilon", epsilon, "measurement inaccuracy in [0, 0.3]");
    app->add_option("--horizon", horizon, "control steps per episode");
  }

  qfc::EnvConfig make() const {
    qfc::EnvConfig cfg;
    try {
      cfg.noise = qfc::parse_noise_kind(noise);
    } catch (const qfc::Error& e) {
      throw qfc::ConfigError(e.what());
    }
    cfg.alpha = alpha;
    cfg.epsilon = epsilon;
    cfg.horizon = horizon;
    try {
      cfg.validate();
    } catch (const qfc::Error& e) {
      throw qfc::ConfigError(e.what());
    }
    return cfg;
  }
};

int run_train(const std::string& scenario_name, const EnvArgs& env_args, std::uint64_t seed,
              long timesteps, const std::string& out, const std::string& curve_path) {
  qfc::rl::Scenario scenario;
  try {
    scenario = qfc::rl::parse_scenario(scenario_name);
  } catch (const qfc::Error& e) {
    throw qfc::ConfigError(e.what());
  }
  const qfc::EnvConfig env = env_args.make();
  qfc::rl::PpoConfig ppo = qfc::rl::PpoConfig::defaults_for(scenario);
  ppo.total_timesteps = timesteps;
  try {
    ppo.validate();
  } catch (const qfc::ParameterError& e) {
    throw qfc::ConfigError(e.what());
  }
  const auto progress = [](const qfc::rl::TrainingCurvePoint& p) {
    if (p.update_index % 20 == 0) {
      std::fprintf(stderr, "update %d  steps %ld  mean episode reward %.4f\n", p.update_index,
                   p.timesteps, p.mean_episode_reward);
    }
  };
  const qfc::rl::TrainResult r = qfc::rl::train(scenario, env, ppo, seed, progress);
  qfc::rl::save_checkpoint(out, scenario, *r.model,
                           {{"seed", std::to_string(seed)},
                            {"timesteps", std::to_string(timesteps)},
                            {"noise", env_args.noise},
                            {"alpha", std::to_string(env.alpha)},
                            {"epsilon", std::to_string(env.epsilon)}});
  if (!curve_path.empty()) qfc::rl::write_training_curve(curve_path, r.curve);
  std::printf("wrote %s (%ld episodes, %ld filter aborts, checksum %016llx)\n", out.c_str(),
              r.episodes, r.filter_aborts, static_cast<unsigned long long>(r.model->checksum()));
  return kExitOk;
}

int run_eval(const std::string& policy_arg, const EnvArgs& env_args, int episodes,
             std::uint64_t seed, double f_star) {
  const qfc::EnvConfig env = env_args.make();
  if (episodes < 1) throw qfc::ConfigError("--episodes must be at least 1");
  qfc::Policy policy = qfc::basic_policy();
  if (policy_arg != "basic") {
    qfc::rl::Checkpoint ck = qfc::rl::load_checkpoint(policy_arg);
    auto model = std::make_shared<qfc::rl::ActorCritic>(ck.arch, std::move(ck.params));
    policy = qfc::rl::to_policy(model, qfc::rl::to_string(ck.scenario));
  }
  const qfc::harness::CellResult r = qfc::harness::evaluate(policy, env, episodes, seed, f_star);
  std::cout << qfc::harness::results_csv_header() << '\n'
            << qfc::harness::results_csv_row(r) << '\n';
  return kExitOk;
}

int run_sweep(const std::string& config_path, bool desk_scale, bool resume) {
  qfc::harness::SweepConfig cfg = qfc::harness::load_sweep_config(config_path);
  if (desk_scale) cfg.apply_desk_scale();
  qfc::harness::SweepOptions opts;
  opts.resume = resume;
  opts.log = [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };
  const auto results = qfc::harness::sweep(cfg, opts);
  const auto thresholds = qfc::harness::threshold_alpha(results, cfg.f_star);
  qfc::harness::emit_report(results, thresholds, cfg.f_star, cfg.out_dir);
  std::printf("%zu cells written to %s\n", results.size(), cfg.out_dir.string().c_str());
  return kExitOk;
}

int run_report(const std::string& results_dir, const std::string& out_dir, double f_star) {
  const auto results = qfc::harness::load_results(results_dir);
  if (results.empty()) throw qfc::ConfigError("no result rows in " + results_dir);
  qfc::harness::emit_report(results, qfc::harness::threshold_alpha(results, f_star), f_star,
                            out_dir);
  std::printf("report written to %s\n", out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qutrit feedback control laboratory"};
  app.require_subcommand(1);

  std::string scenario, out, curve;
  EnvArgs train_env;
  std::uint64_t train_seed = 0;
  long timesteps = 200000;
  CLI::App* train = app.add_subcommand("train", "train an RL agent and write a checkpoint");
  train->add_option("--scenario", scenario, "mbs | dbs | qomdp")->required();
  train_env.add_to(train);
  train->add_option("--seed", train_seed, "training seed");
  train->add_option("--timesteps", timesteps, "total environment steps");
  train->add_option("--out", out, "checkpoint path")->required();
  train->add_option("--curve", curve, "optional training-curve CSV path");

  std::string policy = "basic";
  EnvArgs eval_env;
  int episodes = 1000;
  std::uint64_t eval_seed = 0;
  double eval_f_star = 0.9;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a policy on one grid cell");
  eval->add_option("--policy", policy, "basic or a checkpoint path");
  eval_env.add_to(eval);
  eval->add_option("--episodes", episodes, "validation episodes");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--f-star", eval_f_star, "fidelity threshold for steps-to-threshold");

  std::string config;
  bool desk = false, resume = false;
  CLI::App* sweep = app.add_subcommand("sweep", "run a grid sweep and write its report");
  sweep->add_option("--config", config, "sweep configuration file")->required();
  sweep->add_flag("--desk-scale", desk, "use the reduced alpha/epsilon grid and 200 episodes");
  sweep->add_flag("--resume", resume, "reuse completed cells from a previous run");

  std::string results_dir, report_out;
  double report_f_star = 0.9;
  CLI::App* report = app.add_subcommand("report", "render CSV/SVG reports from results.csv");
  report->add_option("--results", results_dir, "directory containing results.csv")->required();
  report->add_option("--out", report_out, "output directory")->required();
  report->add_option("--f-star", report_f_star, "fidelity threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train) return run_train(scenario, train_env, train_seed, timesteps, out, curve);
    if (*eval) return run_eval(policy, eval_env, episodes, eval_seed, eval_f_star);
    if (*sweep) return run_sweep(config, desk, resume);
    if (*report) return run_report(results_dir, report_out, report_f_star);
  } catch (const qfc::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const qfc::MissingCheckpoint& e) {
    std::fprintf(stderr, "missing checkpoint: %s\n", e.what());
    return kExitMissingCheckpoint;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
