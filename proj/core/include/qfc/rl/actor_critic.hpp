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

#ifndef QFC_RL_ACTOR_CRITIC_HPP_
#define QFC_RL_ACTOR_CRITIC_HPP_

// Separate policy and value trunks (optionally fed by one LSTM each), a
// linear action head (beta mean, plus a stop logit for outcome-only agents),
// a linear value head and a state-independent log standard deviation.

#include <cstdint>
#include <string>
#include <vector>

#include "qfc/controllers.hpp"
#include "qfc/rl/distributions.hpp"
#include "qfc/rl/nn.hpp"

namespace qfc::rl {

struct ArchConfig {
  ObservationKind observation_kind = ObservationKind::kFullState;
  int obs_dim = 9;
  std::vector<int> hidden{64, 64, 64};
  int lstm_hidden = 0;  // 0 selects the feed-forward variant
  bool stop_head = false;
  double init_log_std = 0.0;

  bool recurrent() const { return lstm_hidden > 0; }
  void validate() const;

  // 9-entry state input, three tanh layers of 64 units.
  static ArchConfig feed_forward();
  // (outcome, previous beta) input, LSTM(64) ahead of each trunk, stop head.
  static ArchConfig recurrent_outcome();
};

struct NetworkParams {
  Lstm pi_lstm;
  Lstm vf_lstm;
  Mlp pi_trunk;
  Mlp vf_trunk;
  Dense action_head;
  Dense value_head;
  double log_std = 0.0;

  // Zero-valued parameters shaped for `arch`.
  static NetworkParams zeros(const ArchConfig& arch);

  // Calls f(name, data, rows, cols) for every tensor in a fixed order. The
  // order is the checkpoint order.
  template <typename F>
  void visit(F&& f);
  template <typename F>
  void visit(F&& f) const {
    const_cast<NetworkParams*>(this)->visit(
        [&f](const std::string& name, double* data, Eigen::Index rows, Eigen::Index cols) {
          f(name, static_cast<const double*>(data), rows, cols);
        });
  }

  Eigen::Index size() const;
  Vector flatten() const;
  void unflatten(const Vector& flat);
};

struct Batch {
  Matrix obs;               // obs_dim x N
  std::vector<int> starts;  // recurrent only: first column of each sequence
  std::vector<LstmState> pi_init;
  std::vector<LstmState> vf_init;

  Eigen::Index size() const { return obs.cols(); }
};

struct Heads {
  RowVector mean;
  RowVector stop_logit;  // empty without a stop head
  RowVector value;
};

struct HeadGrads {
  RowVector d_mean;
  RowVector d_stop;  // may be empty
  RowVector d_value;
  double d_log_std = 0.0;
};

struct ForwardTape {
  MlpTape pi, vf;
  Matrix pi_feat, vf_feat;
  std::vector<LstmTape> pi_lstm, vf_lstm;
};

// 9-entry real encoding (r00, r11, r22, Re r01, Im r01, Re r02, Im r02,
// Re r12, Im r12). Lossless for Hermitian matrices.
Vector encode_state_observation(const DensityOperator& rho);
ComplexMatrix decode_state_observation(const Vector& encoded);
// (last outcome, previous beta).
Vector encode_outcome_observation(const OutcomePair& obs);

class ActorCritic final : public StochasticModel {
 public:
  // Orthogonal initialisation: trunks gain sqrt(2), action head 0.01, value
  // head 1, LSTM weights 1; zero biases.
  ActorCritic(ArchConfig arch, std::uint64_t seed);
  ActorCritic(ArchConfig arch, NetworkParams params);

  const ArchConfig& arch() const { return arch_; }
  const NetworkParams& params() const { return params_; }
  NetworkParams& mutable_params() { return params_; }
  bool recurrent() const { return arch_.recurrent(); }
  double log_std() const { return params_.log_std; }

  Vector encode(const Observation& obs) const;

  Heads forward(const Batch& batch, ForwardTape* tape) const;
  // Accumulates into grad (which must be shaped like params()).
  void backward(const Batch& batch, const ForwardTape& tape, const HeadGrads& grads,
                NetworkParams& grad) const;

  struct StepOutput {
    ActionDistribution dist;
    double value = 0.0;
  };
  // Single-observation evaluation that advances the recurrent memory.
  StepOutput step(const Vector& encoded_obs, std::vector<double>& memory) const;
  double value_only(const Vector& encoded_obs, const std::vector<double>& memory) const;

  ActionDistribution distribution(const Heads& heads, Eigen::Index col) const;

  // Memory layout: [h_pi, c_pi, h_vf, c_vf].
  std::vector<double> initial_memory() const override;
  static void unpack_memory(const std::vector<double>& memory, int hidden, LstmState& pi,
                            LstmState& vf);
  static std::vector<double> pack_memory(const LstmState& pi, const LstmState& vf);

  ObservationKind observation_kind() const override { return arch_.observation_kind; }
  bool has_stop_action() const override { return arch_.stop_head; }
  ControlAction act(const Observation& obs, std::vector<double>& memory, RngStream& rng,
                    bool greedy) const override;

  // FNV-1a over the flattened parameter bytes.
  std::uint64_t checksum() const;

 private:
  ArchConfig arch_;
  NetworkParams params_;
};

template <typename F>
void NetworkParams::visit(F&& f) {
  auto lstm = [&f](const std::string& prefix, Lstm& cell) {
    if (cell.empty()) return;
    f(prefix + ".w_in", cell.w_in.data(), cell.w_in.rows(), cell.w_in.cols());
    f(prefix + ".w_h", cell.w_h.data(), cell.w_h.rows(), cell.w_h.cols());
    f(prefix + ".b", cell.b.data(), cell.b.rows(), Eigen::Index{1});
  };
  auto mlp = [&f](const std::string& prefix, Mlp& net) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      Dense& l = net.layers[i];
      const std::string p = prefix + "." + std::to_string(i);
      f(p + ".w", l.w.data(), l.w.rows(), l.w.cols());
      f(p + ".b", l.b.data(), l.b.rows(), Eigen::Index{1});
    }
  };
  lstm("pi_lstm", pi_lstm);
  lstm("vf_lstm", vf_lstm);
  mlp("pi_trunk", pi_trunk);
  mlp("vf_trunk", vf_trunk);
  f(std::string("action_head.w"), action_head.w.data(), action_head.w.rows(),
    action_head.w.cols());
  f(std::string("action_head.b"), action_head.b.data(), action_head.b.rows(), Eigen::Index{1});
  f(std::string("value_head.w"), value_head.w.data(), value_head.w.rows(), value_head.w.cols());
  f(std::string("value_head.b"), value_head.b.data(), value_head.b.rows(), Eigen::Index{1});
  f(std::string("log_std"), &log_std, Eigen::Index{1}, Eigen::Index{1});
}

}  // namespace qfc::rl

#endif  // QFC_RL_ACTOR_CRITIC_HPP_
