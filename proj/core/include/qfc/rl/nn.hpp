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

#ifndef QFC_RL_NN_HPP_
#define QFC_RL_NN_HPP_

// Minimal dense layers, tanh MLP trunks and an LSTM cell with hand-written
// reverse-mode gradients. Activations are column-major batches: one column
// per sample.

#include <Eigen/Dense>

#include <vector>

#include "qfc/rng.hpp"

namespace qfc::rl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct Dense {
  Matrix w;  // out x in
  Vector b;  // out

  Dense() = default;
  Dense(int in, int out) : w(Matrix::Zero(out, in)), b(Vector::Zero(out)) {}

  int in() const { return static_cast<int>(w.cols()); }
  int out() const { return static_cast<int>(w.rows()); }
  Matrix forward(const Matrix& x) const { return (w * x).colwise() + b; }
  void set_zero() {
    w.setZero();
    b.setZero();
  }
};

// Stack of tanh layers (hidden layers only; heads are separate).
struct Mlp {
  std::vector<Dense> layers;

  Mlp() = default;
  Mlp(int in, const std::vector<int>& hidden);

  int out_dim(int in) const { return layers.empty() ? in : layers.back().out(); }
  void set_zero();
};

struct MlpTape {
  std::vector<Matrix> activations;  // [0] is the input
};

Matrix mlp_forward(const Mlp& mlp, const Matrix& x, MlpTape* tape);
// Accumulates parameter gradients into `grad`; returns d loss / d input.
Matrix mlp_backward(const Mlp& mlp, const MlpTape& tape, const Matrix& d_out, Mlp& grad);

// Gate layout i, f, g, o (input, forget, cell candidate, output).
struct Lstm {
  Matrix w_in;  // 4H x in
  Matrix w_h;   // 4H x H
  Vector b;     // 4H

  Lstm() = default;
  Lstm(int in, int hidden);

  int hidden() const { return static_cast<int>(w_h.cols()); }
  int in() const { return static_cast<int>(w_in.cols()); }
  bool empty() const { return w_h.size() == 0; }
  void set_zero();
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(int hidden) { return {Vector::Zero(hidden), Vector::Zero(hidden)}; }
};

struct LstmTape {
  std::vector<Vector> h_prev, c_prev, i, f, g, o, tanh_c;
  Matrix x;
};

// One step; used while acting.
LstmState lstm_step(const Lstm& cell, const Vector& x, const LstmState& state);

// Runs the cell over the columns of x_seq and returns the hidden outputs
// (H x L).
Matrix lstm_forward(const Lstm& cell, const Matrix& x_seq, const LstmState& init,
                    LstmTape* tape, LstmState* final_state = nullptr);
// Backpropagation through time from d loss / d outputs; the initial state is
// treated as a constant.
void lstm_backward(const Lstm& cell, const LstmTape& tape, const Matrix& d_out, Lstm& grad);

// Orthogonal initialisation scaled by `gain` (QR of a Gaussian matrix).
void orthogonal_init(Matrix& w, double gain, RngStream& rng);

// Adam with PyTorch's update form.
class Adam {
 public:
  Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-5);

  void step(Vector& params, const Vector& grad);
  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Vector m_, v_;
  long t_ = 0;
};

// Scales grad in place so that its L2 norm is at most max_norm; returns the
// norm before clipping.
double clip_grad_norm(Vector& grad, double max_norm);

}  // namespace qfc::rl

#endif  // QFC_RL_NN_HPP_
