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

#include "qfc/rl/nn.hpp"

#include <cmath>

#include "qfc/errors.hpp"

namespace qfc::rl {
namespace {

Vector sigmoid(const Vector& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

}  // namespace

Mlp::Mlp(int in, const std::vector<int>& hidden) {
  int prev = in;
  for (int h : hidden) {
    layers.emplace_back(prev, h);
    prev = h;
  }
}

void Mlp::set_zero() {
  for (auto& l : layers) l.set_zero();
}

Matrix mlp_forward(const Mlp& mlp, const Matrix& x, MlpTape* tape) {
  if (tape) {
    tape->activations.clear();
    tape->activations.push_back(x);
  }
  Matrix a = x;
  for (const auto& layer : mlp.layers) {
    a = layer.forward(a).array().tanh().matrix();
    if (tape) tape->activations.push_back(a);
  }
  return a;
}

Matrix mlp_backward(const Mlp& mlp, const MlpTape& tape, const Matrix& d_out, Mlp& grad) {
  Matrix d = d_out;
  for (int i = static_cast<int>(mlp.layers.size()) - 1; i >= 0; --i) {
    const Matrix& out = tape.activations[i + 1];
    const Matrix dz = (d.array() * (1.0 - out.array().square())).matrix();
    grad.layers[i].w.noalias() += dz * tape.activations[i].transpose();
    grad.layers[i].b += dz.rowwise().sum();
    d = mlp.layers[i].w.transpose() * dz;
  }
  return d;
}

Lstm::Lstm(int in, int hidden)
    : w_in(Matrix::Zero(4 * hidden, in)),
      w_h(Matrix::Zero(4 * hidden, hidden)),
      b(Vector::Zero(4 * hidden)) {}

void Lstm::set_zero() {
  w_in.setZero();
  w_h.setZero();
  b.setZero();
}

LstmState lstm_step(const Lstm& cell, const Vector& x, const LstmState& state) {
  const int h = cell.hidden();
  const Vector z = cell.w_in * x + cell.w_h * state.h + cell.b;
  const Vector i = sigmoid(z.segment(0, h));
  const Vector f = sigmoid(z.segment(h, h));
  const Vector g = z.segment(2 * h, h).array().tanh().matrix();
  const Vector o = sigmoid(z.segment(3 * h, h));
  LstmState next;
  next.c = (f.array() * state.c.array() + i.array() * g.array()).matrix();
  next.h = (o.array() * next.c.array().tanh()).matrix();
  return next;
}

Matrix lstm_forward(const Lstm& cell, const Matrix& x_seq, const LstmState& init,
                    LstmTape* tape, LstmState* final_state) {
  const int h = cell.hidden();
  const Eigen::Index len = x_seq.cols();
  Matrix out(h, len);
  if (tape) {
    *tape = LstmTape{};
    tape->x = x_seq;
  }
  LstmState state = init;
  for (Eigen::Index t = 0; t < len; ++t) {
    const Vector z = cell.w_in * x_seq.col(t) + cell.w_h * state.h + cell.b;
    const Vector i = sigmoid(z.segment(0, h));
    const Vector f = sigmoid(z.segment(h, h));
    const Vector g = z.segment(2 * h, h).array().tanh().matrix();
    const Vector o = sigmoid(z.segment(3 * h, h));
    const Vector c = (f.array() * state.c.array() + i.array() * g.array()).matrix();
    const Vector tc = c.array().tanh().matrix();
    if (tape) {
      tape->h_prev.push_back(state.h);
      tape->c_prev.push_back(state.c);
      tape->i.push_back(i);
      tape->f.push_back(f);
      tape->g.push_back(g);
      tape->o.push_back(o);
      tape->tanh_c.push_back(tc);
    }
    state.c = c;
    state.h = (o.array() * tc.array()).matrix();
    out.col(t) = state.h;
  }
  if (final_state) *final_state = state;
  return out;
}

void lstm_backward(const Lstm& cell, const LstmTape& tape, const Matrix& d_out, Lstm& grad) {
  const int h = cell.hidden();
  const auto len = static_cast<Eigen::Index>(tape.i.size());
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  Vector dz(4 * h);
  for (Eigen::Index t = len - 1; t >= 0; --t) {
    const Vector& i = tape.i[t];
    const Vector& f = tape.f[t];
    const Vector& g = tape.g[t];
    const Vector& o = tape.o[t];
    const Vector& tc = tape.tanh_c[t];
    const Vector dh = d_out.col(t) + dh_next;
    const Vector d_o = (dh.array() * tc.array()).matrix();
    const Vector dc =
        (dh.array() * o.array() * (1.0 - tc.array().square()) + dc_next.array()).matrix();
    const Vector d_i = (dc.array() * g.array()).matrix();
    const Vector d_g = (dc.array() * i.array()).matrix();
    const Vector d_f = (dc.array() * tape.c_prev[t].array()).matrix();
    dc_next = (dc.array() * f.array()).matrix();
    dz.segment(0, h) = (d_i.array() * i.array() * (1.0 - i.array())).matrix();
    dz.segment(h, h) = (d_f.array() * f.array() * (1.0 - f.array())).matrix();
    dz.segment(2 * h, h) = (d_g.array() * (1.0 - g.array().square())).matrix();
    dz.segment(3 * h, h) = (d_o.array() * o.array() * (1.0 - o.array())).matrix();
    grad.w_in.noalias() += dz * tape.x.col(t).transpose();
    grad.w_h.noalias() += dz * tape.h_prev[t].transpose();
    grad.b += dz;
    dh_next = cell.w_h.transpose() * dz;
  }
}

void orthogonal_init(Matrix& w, double gain, RngStream& rng) {
  const Eigen::Index rows = w.rows();
  const Eigen::Index cols = w.cols();
  if (rows == 0 || cols == 0) return;
  const Eigen::Index big = std::max(rows, cols);
  const Eigen::Index small = std::min(rows, cols);
  Matrix gaussian(big, small);
  for (Eigen::Index j = 0; j < small; ++j) {
    for (Eigen::Index i = 0; i < big; ++i) gaussian(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ() * Matrix::Identity(big, small);
  const Matrix r = qr.matrixQR().topLeftCorner(small, small);
  for (Eigen::Index j = 0; j < small; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  w = gain * (rows >= cols ? q : Matrix(q.transpose()));
}

Adam::Adam(Eigen::Index size, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Vector::Zero(size)),
      v_(Vector::Zero(size)) {
  if (!(learning_rate > 0.0)) throw ParameterError("Adam: learning rate must be positive");
}

void Adam::step(Vector& params, const Vector& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw DimensionError("Adam: parameter size mismatch");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ / bias1;
  const Vector denom = (v_.array().sqrt() / std::sqrt(bias2) + eps_).matrix();
  params.array() -= step * m_.array() / denom.array();
}

double clip_grad_norm(Vector& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / (norm + 1e-6);
  return norm;
}

}  // namespace qfc::rl
