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
#include <functional>

#include "qfc/rl/nn.hpp"

namespace qfc::rl {
namespace {

Matrix random_matrix(int rows, int cols, RngStream& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

// Central difference of a scalar function with respect to one entry.
double central_difference(double& x, const std::function<double()>& f, double h = 1e-6) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

void expect_close(double analytic, double numeric, const char* what, int index) {
  const double scale = std::max({1e-6, std::abs(analytic), std::abs(numeric)});
  EXPECT_LE(std::abs(analytic - numeric) / scale, 1e-5)
      << what << "[" << index << "] analytic " << analytic << " numeric " << numeric;
}

TEST(Dense, ForwardAddsBias) {
  Dense d(2, 1);
  d.w << 1.0, 2.0;
  d.b << 0.5;
  Matrix x(2, 2);
  x << 1.0, 0.0, 1.0, -1.0;
  const Matrix y = d.forward(x);
  EXPECT_DOUBLE_EQ(y(0, 0), 3.5);
  EXPECT_DOUBLE_EQ(y(0, 1), -1.5);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  RngStream rng(1, 0);
  Mlp mlp(4, {5, 3});
  for (auto& l : mlp.layers) {
    l.w = random_matrix(l.out(), l.in(), rng, 0.7);
    l.b = random_matrix(l.out(), 1, rng, 0.3);
  }
  Matrix x = random_matrix(4, 6, rng);
  const Matrix weights = random_matrix(3, 6, rng);
  auto loss = [&]() { return (mlp_forward(mlp, x, nullptr).array() * weights.array()).sum(); };

  MlpTape tape;
  mlp_forward(mlp, x, &tape);
  Mlp grad = mlp;
  grad.set_zero();
  const Matrix dx = mlp_backward(mlp, tape, weights, grad);

  for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
    for (Eigen::Index i = 0; i < mlp.layers[k].w.size(); ++i) {
      expect_close(grad.layers[k].w.data()[i],
                   central_difference(mlp.layers[k].w.data()[i], loss), "w", static_cast<int>(i));
    }
    for (Eigen::Index i = 0; i < mlp.layers[k].b.size(); ++i) {
      expect_close(grad.layers[k].b[i], central_difference(mlp.layers[k].b[i], loss), "b",
                   static_cast<int>(i));
    }
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    expect_close(dx.data()[i], central_difference(x.data()[i], loss), "x", static_cast<int>(i));
  }
}

TEST(Mlp, GradientsAccumulate) {
  RngStream rng(2, 0);
  Mlp mlp(2, {3});
  mlp.layers[0].w = random_matrix(3, 2, rng);
  const Matrix x = random_matrix(2, 4, rng);
  const Matrix d = random_matrix(3, 4, rng);
  MlpTape tape;
  mlp_forward(mlp, x, &tape);
  Mlp once = mlp, twice = mlp;
  once.set_zero();
  twice.set_zero();
  mlp_backward(mlp, tape, d, once);
  mlp_backward(mlp, tape, d, twice);
  mlp_backward(mlp, tape, d, twice);
  EXPECT_LE((twice.layers[0].w - 2.0 * once.layers[0].w).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Lstm, ForwardMatchesSteps) {
  RngStream rng(3, 0);
  Lstm cell(3, 4);
  cell.w_in = random_matrix(16, 3, rng, 0.5);
  cell.w_h = random_matrix(16, 4, rng, 0.5);
  cell.b = random_matrix(16, 1, rng, 0.2);
  const Matrix xs = random_matrix(3, 7, rng);
  LstmState init{random_matrix(4, 1, rng, 0.3), random_matrix(4, 1, rng, 0.3)};
  LstmState final_state;
  const Matrix h = lstm_forward(cell, xs, init, nullptr, &final_state);
  LstmState s = init;
  for (int t = 0; t < 7; ++t) {
    s = lstm_step(cell, xs.col(t), s);
    EXPECT_LE((h.col(t) - s.h).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_LE((final_state.c - s.c).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Lstm, GradientMatchesFiniteDifferences) {
  RngStream rng(4, 0);
  Lstm cell(2, 3);
  cell.w_in = random_matrix(12, 2, rng, 0.6);
  cell.w_h = random_matrix(12, 3, rng, 0.6);
  cell.b = random_matrix(12, 1, rng, 0.3);
  const Matrix xs = random_matrix(2, 5, rng);
  const LstmState init{random_matrix(3, 1, rng, 0.4), random_matrix(3, 1, rng, 0.4)};
  const Matrix weights = random_matrix(3, 5, rng);
  auto loss = [&]() {
    return (lstm_forward(cell, xs, init, nullptr).array() * weights.array()).sum();
  };
  LstmTape tape;
  lstm_forward(cell, xs, init, &tape);
  Lstm grad = cell;
  grad.set_zero();
  lstm_backward(cell, tape, weights, grad);
  for (Eigen::Index i = 0; i < cell.w_in.size(); ++i) {
    expect_close(grad.w_in.data()[i], central_difference(cell.w_in.data()[i], loss), "w_in",
                 static_cast<int>(i));
  }
  for (Eigen::Index i = 0; i < cell.w_h.size(); ++i) {
    expect_close(grad.w_h.data()[i], central_difference(cell.w_h.data()[i], loss), "w_h",
                 static_cast<int>(i));
  }
  for (Eigen::Index i = 0; i < cell.b.size(); ++i) {
    expect_close(grad.b[i], central_difference(cell.b[i], loss), "b", static_cast<int>(i));
  }
}

TEST(OrthogonalInit, ColumnsOrRowsAreOrthonormal) {
  RngStream rng(5, 0);
  Matrix tall(6, 3), wide(3, 6);
  orthogonal_init(tall, 2.0, rng);
  orthogonal_init(wide, 1.0, rng);
  EXPECT_LE((tall.transpose() * tall - 4.0 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((wide * wide.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam(2, 0.1, 0.9, 0.999, 1e-8);
  Vector p = Vector::Zero(2);
  Vector g(2);
  g << 3.0, -0.5;
  adam.step(p, g);
  EXPECT_NEAR(p[0], -0.1, 1e-8);
  EXPECT_NEAR(p[1], 0.1, 1e-7);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, MinimisesQuadratic) {
  Adam adam(1, 0.05);
  Vector p(1);
  p << 3.0;
  for (int i = 0; i < 2000; ++i) {
    Vector g(1);
    g << 2.0 * (p[0] - 1.0);
    adam.step(p, g);
  }
  EXPECT_NEAR(p[0], 1.0, 1e-3);
}

TEST(ClipGradNorm, ScalesOnlyWhenAbove) {
  Vector g(2);
  g << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(clip_grad_norm(g, 10.0), 5.0);
  EXPECT_DOUBLE_EQ(g[0], 3.0);
  EXPECT_DOUBLE_EQ(clip_grad_norm(g, 0.5), 5.0);
  EXPECT_NEAR(g.norm(), 0.5, 1e-6);
}

}  // namespace
}  // namespace qfc::rl
