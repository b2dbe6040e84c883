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

#ifndef QFC_QCORE_HPP_
#define QFC_QCORE_HPP_

// Small dense complex linear algebra for density operators.
//
// Matrices are dimension-generic but capped at kMaxDim so that the 3x3 state
// matrices and the 9x9 Choi matrices live on the stack.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace qfc {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 9;
inline constexpr double kDefaultTol = 1e-10;

using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                    Eigen::ColMajor, kMaxDim, kMaxDim>;
using ComplexVector =
    Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using RealVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

// Largest absolute entry.
double max_abs(const ComplexMatrix& m);

// Max-entry distance |a - b|.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol);

ComplexMatrix identity_matrix(int dim);

struct SpectralDecomposition {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // column i pairs with eigenvalues[i]

  ComplexMatrix reconstruct() const;
};

// Eigendecomposition of a Hermitian matrix. Only the lower triangle is read.
SpectralDecomposition hermitian_eigen(const ComplexMatrix& m);

// Applies f to the spectrum of a Hermitian matrix: V f(diag) V^dagger.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& m, F&& f) {
  const SpectralDecomposition sd = hermitian_eigen(m);
  const int n = static_cast<int>(sd.eigenvalues.size());
  ComplexMatrix scaled = sd.eigenvectors;
  for (int i = 0; i < n; ++i) scaled.col(i) *= f(sd.eigenvalues[i]);
  return scaled * sd.eigenvectors.adjoint();
}

// exp(m). Hermitian and skew-Hermitian inputs go through the spectral path;
// anything else uses scaling and squaring.
ComplexMatrix matrix_exponential(const ComplexMatrix& m);

struct Violation {
  enum class Kind { kNotFinite, kNotHermitian, kTraceNotOne, kNotPositive };
  Kind kind;
  double deviation;
};

std::string to_string(Violation::Kind kind);

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  bool has(Violation::Kind kind) const;
  std::string describe() const;
};

// Checks the density-operator invariants. Throws DimensionError on a
// non-square input.
ValidationReport validate_density(const ComplexMatrix& m,
                                  double tol = kDefaultTol);

// A Hermitian, unit-trace, positive-semidefinite matrix. Every instance has
// passed validate_density.
class DensityOperator {
 public:
  // Throws StateValidityError listing the violated invariants.
  static DensityOperator from_matrix(const ComplexMatrix& m,
                                     double tol = kDefaultTol);
  // For results of state updates: Hermitizes m and, if it then fails
  // validation only through eigenvalues in [-repair_tol, 0) or trace drift,
  // clips those eigenvalues to zero and renormalizes. Anything worse throws
  // StateValidityError.
  static DensityOperator from_update(const ComplexMatrix& m,
                                     double repair_tol = 1e-8);
  static DensityOperator basis(int dim, int index);
  static DensityOperator maximally_mixed(int dim);
  static DensityOperator pure(const ComplexVector& psi);
  // Real diagonal state diag(p); p must be a probability vector.
  static DensityOperator diagonal(const std::vector<double>& p);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  // Real part of the k-th diagonal entry.
  double population(int k) const;

 private:
  explicit DensityOperator(const ComplexMatrix& m) : m_(m) {}

  ComplexMatrix m_;
};

// Uhlmann fidelity tr[sqrt(sqrt(rho) sigma sqrt(rho))]^2, clamped to [0, 1].
// Eigenvalues in [-tol, 0) are treated as zero; more negative ones throw
// StateValidityError.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma,
                double tol = kDefaultTol);

// Fidelity with the basis projector |k><k|, i.e. rho[k,k].
double fidelity_pure_target(const DensityOperator& rho, int basis_index);

}  // namespace qfc

#endif  // QFC_QCORE_HPP_
