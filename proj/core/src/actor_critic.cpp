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

#include "qfc/rl/actor_critic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string_view>

#include "qfc/errors.hpp"

namespace qfc::rl {

void ArchConfig::validate() const {
  if (obs_dim < 1) throw ParameterError("ArchConfig: obs_dim must be positive");
  if (lstm_hidden < 0) throw ParameterError("ArchConfig: negative lstm_hidden");
  for (int h : hidden) {
    if (h < 1) throw ParameterError("ArchConfig: hidden sizes must be positive");
  }
  if (!(init_log_std >= kLogStdMin && init_log_std <= kLogStdMax)) {
    throw ParameterError("ArchConfig: init_log_std outside [-20, 2]");
  }
}

ArchConfig ArchConfig::feed_forward() { return ArchConfig{}; }

ArchConfig ArchConfig::recurrent_outcome() {
  ArchConfig a;
  a.observation_kind = ObservationKind::kOutcomePair;
  a.obs_dim = 2;
  a.lstm_hidden = 64;
  a.stop_head = true;
  return a;
}

NetworkParams NetworkParams::zeros(const ArchConfig& arch) {
  arch.validate();
  NetworkParams p;
  int trunk_in = arch.obs_dim;
  if (arch.recurrent()) {
    p.pi_lstm = Lstm(arch.obs_dim, arch.lstm_hidden);
    p.vf_lstm = Lstm(arch.obs_dim, arch.lstm_hidden);
    trunk_in = arch.lstm_hidden;
  }
  p.pi_trunk = Mlp(trunk_in, arch.hidden);
  p.vf_trunk = Mlp(trunk_in, arch.hidden);
  const int feat = p.pi_trunk.out_dim(trunk_in);
  p.action_head = Dense(feat, arch.stop_head ? 2 : 1);
  p.value_head = Dense(feat, 1);
  p.log_std = 0.0;
  return p;
}

Eigen::Index NetworkParams::size() const {
  Eigen::Index n = 0;
  visit([&n](const std::string&, const double*, Eigen::Index r, Eigen::Index c) { n += r * c; });
  return n;
}

Vector NetworkParams::flatten() const {
  Vector flat(size());
  Eigen::Index off = 0;
  visit([&](const std::string&, const double* d, Eigen::Index r, Eigen::Index c) {
    std::copy(d, d + r * c, flat.data() + off);
    off += r * c;
  });
  return flat;
}

void NetworkParams::unflatten(const Vector& flat) {
  if (flat.size() != size()) throw DimensionError("unflatten: size mismatch");
  Eigen::Index off = 0;
  visit([&](const std::string&, double* d, Eigen::Index r, Eigen::Index c) {
    std::copy(flat.data() + off, flat.data() + off + r * c, d);
    off += r * c;
  });
}

Vector encode_state_observation(const DensityOperator& rho) {
  const ComplexMatrix& m = rho.matrix();
  if (m.rows() != 3) throw DimensionError("encode_state_observation: expected 3x3");
  Vector v(9);
  v << m(0, 0).real(), m(1, 1).real(), m(2, 2).real(), m(0, 1).real(), m(0, 1).imag(),
      m(0, 2).real(), m(0, 2).imag(), m(1, 2).real(), m(1, 2).imag();
  return v;
}

ComplexMatrix decode_state_observation(const Vector& v) {
  if (v.size() != 9) throw DimensionError("decode_state_observation: expected 9 entries");
  ComplexMatrix m(3, 3);
  m(0, 0) = v[0];
  m(1, 1) = v[1];
  m(2, 2) = v[2];
  m(0, 1) = Complex(v[3], v[4]);
  m(0, 2) = Complex(v[5], v[6]);
  m(1, 2) = Complex(v[7], v[8]);
  m(1, 0) = std::conj(m(0, 1));
  m(2, 0) = std::conj(m(0, 2));
  m(2, 1) = std::conj(m(1, 2));
  return m;
}

Vector encode_outcome_observation(const OutcomePair& obs) {
  Vector v(2);
  v << static_cast<double>(obs.last_outcome), obs.last_beta;
  return v;
}

ActorCritic::ActorCritic(ArchConfig arch, std::uint64_t seed)
    : arch_(std::move(arch)), params_(NetworkParams::zeros(arch_)) {
  RngStream rng(seed, 0x1417);
  const double trunk_gain = std::sqrt(2.0);
  for (Lstm* cell : {&params_.pi_lstm, &params_.vf_lstm}) {
    if (cell->empty()) continue;
    orthogonal_init(cell->w_in, 1.0, rng);
    orthogonal_init(cell->w_h, 1.0, rng);
  }
  for (Mlp* net : {&params_.pi_trunk, &params_.vf_trunk}) {
    for (auto& layer : net->layers) orthogonal_init(layer.w, trunk_gain, rng);
  }
  orthogonal_init(params_.action_head.w, 0.01, rng);
  orthogonal_init(params_.value_head.w, 1.0, rng);
  params_.log_std = arch_.init_log_std;
}

ActorCritic::ActorCritic(ArchConfig arch, NetworkParams params)
    : arch_(std::move(arch)), params_(std::move(params)) {
  arch_.validate();
  if (params_.size() != NetworkParams::zeros(arch_).size()) {
    throw DimensionError("ActorCritic: parameters do not match the architecture");
  }
}

Vector ActorCritic::encode(const Observation& obs) const {
  if (kind_of(obs) != arch_.observation_kind) {
    throw ContractViolation("ActorCritic: observation kind mismatch");
  }
  if (const auto* s = std::get_if<FullState>(&obs)) return encode_state_observation(s->state);
  return encode_outcome_observation(std::get<OutcomePair>(obs));
}

Heads ActorCritic::forward(const Batch& batch, ForwardTape* tape) const {
  const Eigen::Index n = batch.size();
  Matrix pi_in, vf_in;
  if (recurrent()) {
    const int h = arch_.lstm_hidden;
    pi_in.resize(h, n);
    vf_in.resize(h, n);
    if (tape) {
      tape->pi_lstm.assign(batch.starts.size(), {});
      tape->vf_lstm.assign(batch.starts.size(), {});
    }
    for (std::size_t s = 0; s < batch.starts.size(); ++s) {
      const int begin = batch.starts[s];
      const int end = (s + 1 < batch.starts.size()) ? batch.starts[s + 1] : static_cast<int>(n);
      const Matrix x = batch.obs.middleCols(begin, end - begin);
      pi_in.middleCols(begin, end - begin) = lstm_forward(
          params_.pi_lstm, x, batch.pi_init[s], tape ? &tape->pi_lstm[s] : nullptr);
      vf_in.middleCols(begin, end - begin) = lstm_forward(
          params_.vf_lstm, x, batch.vf_init[s], tape ? &tape->vf_lstm[s] : nullptr);
    }
  }
  const Matrix& pi_src = recurrent() ? pi_in : batch.obs;
  const Matrix& vf_src = recurrent() ? vf_in : batch.obs;
  Matrix pi_feat = mlp_forward(params_.pi_trunk, pi_src, tape ? &tape->pi : nullptr);
  Matrix vf_feat = mlp_forward(params_.vf_trunk, vf_src, tape ? &tape->vf : nullptr);

  Heads heads;
  const Matrix act = params_.action_head.forward(pi_feat);
  heads.mean = act.row(0);
  if (arch_.stop_head) heads.stop_logit = act.row(1);
  heads.value = params_.value_head.forward(vf_feat).row(0);
  if (tape) {
    tape->pi_feat = std::move(pi_feat);
    tape->vf_feat = std::move(vf_feat);
  }
  return heads;
}

void ActorCritic::backward(const Batch& batch, const ForwardTape& tape, const HeadGrads& g,
                           NetworkParams& grad) const {
  const Eigen::Index n = batch.size();
  Matrix d_act(params_.action_head.out(), n);
  d_act.row(0) = g.d_mean;
  if (arch_.stop_head) {
    if (g.d_stop.size() == n) {
      d_act.row(1) = g.d_stop;
    } else {
      d_act.row(1).setZero();
    }
  }
  grad.action_head.w.noalias() += d_act * tape.pi_feat.transpose();
  grad.action_head.b += d_act.rowwise().sum();
  const Matrix d_pi_feat = params_.action_head.w.transpose() * d_act;

  const Matrix d_val = g.d_value;
  grad.value_head.w.noalias() += d_val * tape.vf_feat.transpose();
  grad.value_head.b += d_val.rowwise().sum();
  const Matrix d_vf_feat = params_.value_head.w.transpose() * d_val;

  const Matrix d_pi_in = mlp_backward(params_.pi_trunk, tape.pi, d_pi_feat, grad.pi_trunk);
  const Matrix d_vf_in = mlp_backward(params_.vf_trunk, tape.vf, d_vf_feat, grad.vf_trunk);
  if (recurrent()) {
    for (std::size_t s = 0; s < batch.starts.size(); ++s) {
      const int begin = batch.starts[s];
      const int end = (s + 1 < batch.starts.size()) ? batch.starts[s + 1] : static_cast<int>(n);
      lstm_backward(params_.pi_lstm, tape.pi_lstm[s], d_pi_in.middleCols(begin, end - begin),
                    grad.pi_lstm);
      lstm_backward(params_.vf_lstm, tape.vf_lstm[s], d_vf_in.middleCols(begin, end - begin),
                    grad.vf_lstm);
    }
  }
  grad.log_std += g.d_log_std;
}

std::vector<double> ActorCritic::initial_memory() const {
  if (!recurrent()) return {};
  return std::vector<double>(4 * static_cast<std::size_t>(arch_.lstm_hidden), 0.0);
}

void ActorCritic::unpack_memory(const std::vector<double>& memory, int hidden, LstmState& pi,
                                LstmState& vf) {
  if (memory.size() != 4 * static_cast<std::size_t>(hidden)) {
    throw DimensionError("recurrent memory has the wrong size");
  }
  auto seg = [&](int k) { return Eigen::Map<const Vector>(memory.data() + k * hidden, hidden); };
  pi.h = seg(0);
  pi.c = seg(1);
  vf.h = seg(2);
  vf.c = seg(3);
}

std::vector<double> ActorCritic::pack_memory(const LstmState& pi, const LstmState& vf) {
  std::vector<double> out;
  out.reserve(4 * pi.h.size());
  for (const Vector* v : {&pi.h, &pi.c, &vf.h, &vf.c}) out.insert(out.end(), v->begin(), v->end());
  return out;
}

ActorCritic::StepOutput ActorCritic::step(const Vector& x, std::vector<double>& memory) const {
  Vector pi_in = x;
  Vector vf_in = x;
  if (recurrent()) {
    LstmState pi, vf;
    unpack_memory(memory, arch_.lstm_hidden, pi, vf);
    pi = lstm_step(params_.pi_lstm, x, pi);
    vf = lstm_step(params_.vf_lstm, x, vf);
    pi_in = pi.h;
    vf_in = vf.h;
    memory = pack_memory(pi, vf);
  }
  const Matrix pi_feat = mlp_forward(params_.pi_trunk, pi_in, nullptr);
  const Matrix vf_feat = mlp_forward(params_.vf_trunk, vf_in, nullptr);
  const Matrix act = params_.action_head.forward(pi_feat);
  StepOutput out;
  out.dist.mean = act(0, 0);
  out.dist.log_std = std::clamp(params_.log_std, kLogStdMin, kLogStdMax);
  if (arch_.stop_head) out.dist.stop_logit = act(1, 0);
  out.value = params_.value_head.forward(vf_feat)(0, 0);
  return out;
}

double ActorCritic::value_only(const Vector& x, const std::vector<double>& memory) const {
  std::vector<double> scratch = memory;
  return step(x, scratch).value;
}

ActionDistribution ActorCritic::distribution(const Heads& heads, Eigen::Index col) const {
  ActionDistribution d;
  d.mean = heads.mean[col];
  d.log_std = std::clamp(params_.log_std, kLogStdMin, kLogStdMax);
  if (arch_.stop_head) d.stop_logit = heads.stop_logit[col];
  return d;
}

ControlAction ActorCritic::act(const Observation& obs, std::vector<double>& memory,
                               RngStream& rng, bool greedy) const {
  const StepOutput out = step(encode(obs), memory);
  return greedy ? greedy_action(out.dist).action : sample_action(out.dist, rng).action;
}

std::uint64_t ActorCritic::checksum() const {
  const Vector flat = params_.flatten();
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(flat.data()),
                                  static_cast<std::size_t>(flat.size()) * sizeof(double)));
}

}  // namespace qfc::rl
