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

#ifndef QFC_TESTS_TEST_UTIL_HPP_
#define QFC_TESTS_TEST_UTIL_HPP_

#include "oracles.hpp"
#include "qfc/dynamics.hpp"
#include "qfc/qcore.hpp"
#include "qfc/rng.hpp"

namespace qfc::testing {

inline ComplexMatrix from_oracle(const oracle::Mat3& m) {
  ComplexMatrix r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m[i][j];
  return r;
}

inline oracle::Mat3 to_oracle(const ComplexMatrix& m) {
  oracle::Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m(i, j);
  return r;
}

inline double max_diff(const oracle::Mat3& a, const ComplexMatrix& b) {
  return max_abs_diff(from_oracle(a), b);
}

// Random mixed state: a random convex mixture of three Haar pure states.
inline DensityOperator random_state(RngStream& rng) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  double w[3], total = 0.0;
  for (double& x : w) {
    x = rng.uniform();
    total += x;
  }
  for (double x : w) m += (x / total) * random_pure_state(rng).matrix();
  return DensityOperator::from_matrix(0.5 * (m + m.adjoint()));
}

inline ComplexMatrix random_matrix(RngStream& rng, int dim = 3) {
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

// Random Hermitian matrix scaled to spectral norm `norm`.
inline ComplexMatrix random_hermitian(RngStream& rng, double norm, int dim = 3) {
  const ComplexMatrix g = random_matrix(rng, dim);
  ComplexMatrix h = 0.5 * (g + g.adjoint());
  const double spectral = hermitian_eigen(h).eigenvalues.cwiseAbs().maxCoeff();
  return h * (norm / spectral);
}

}  // namespace qfc::testing

#endif  // QFC_TESTS_TEST_UTIL_HPP_
