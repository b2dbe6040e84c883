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

#include "qfc/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qfc/errors.hpp"

namespace qfc {
namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows()
       << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

double one_norm(const ComplexMatrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    best = std::max(best, m.col(j).cwiseAbs().sum());
  }
  return best;
}

ComplexMatrix exp_scaling_squaring(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  const double norm = one_norm(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const ComplexMatrix scaled = m / std::ldexp(1.0, squarings);

  // ||scaled|| <= 1/2, so 20 Taylor terms are well below double roundoff.
  ComplexMatrix result = identity_matrix(n);
  ComplexMatrix term = identity_matrix(n);
  for (int k = 1; k <= 20; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace

double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      best = std::max(best, std::abs(m(i, j)));
    }
  }
  return best;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: shape mismatch");
  }
  return max_abs(a - b);
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

ComplexMatrix identity_matrix(int dim) {
  return ComplexMatrix::Identity(dim, dim);
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  ComplexMatrix scaled = eigenvectors;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    scaled.col(i) *= eigenvalues[i];
  }
  return scaled * eigenvectors.adjoint();
}

SpectralDecomposition hermitian_eigen(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigen");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eigen: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
  require_square(m, "matrix_exponential");
  if (!all_finite(m)) throw ParameterError("matrix_exponential: non-finite input");
  const double scale = std::max(1.0, max_abs(m));
  const double herm_dev = max_abs(m - m.adjoint());
  const double skew_dev = max_abs(m + m.adjoint());
  if (skew_dev <= 1e-14 * scale) {
    // m = -iH with H = i m Hermitian.
    const ComplexMatrix h = Complex(0.0, 0.5) * (m - m.adjoint());
    return hermitian_function(
        h, [](double lambda) { return std::exp(Complex(0.0, -lambda)); });
  }
  if (herm_dev <= 1e-14 * scale) {
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    return hermitian_function(h, [](double lambda) { return Complex(std::exp(lambda)); });
  }
  return exp_scaling_squaring(m);
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kNotFinite:
      return "not_finite";
    case Violation::Kind::kNotHermitian:
      return "not_hermitian";
    case Violation::Kind::kTraceNotOne:
      return "trace_not_one";
    case Violation::Kind::kNotPositive:
      return "not_positive";
  }
  return "unknown";
}

bool ValidationReport::has(Violation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::describe() const {
  if (ok) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << to_string(violations[i].kind) << " (deviation " << violations[i].deviation
       << ")";
  }
  return os.str();
}

ValidationReport validate_density(const ComplexMatrix& m, double tol) {
  require_square(m, "validate_density");
  ValidationReport report;
  auto fail = [&report](Violation::Kind kind, double deviation) {
    report.ok = false;
    report.violations.push_back({kind, deviation});
  };
  if (!all_finite(m)) {
    fail(Violation::Kind::kNotFinite, std::numeric_limits<double>::infinity());
    return report;
  }
  const double herm_dev = max_abs(m - m.adjoint());
  if (herm_dev > tol) fail(Violation::Kind::kNotHermitian, herm_dev);

  const double trace_dev = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_dev > tol) fail(Violation::Kind::kTraceNotOne, trace_dev);

  // The PSD check runs on the Hermitian part so that it stays meaningful
  // even when the Hermiticity check already failed.
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  const double min_eig = hermitian_eigen(herm).eigenvalues.minCoeff();
  if (min_eig < -tol) fail(Violation::Kind::kNotPositive, -min_eig);
  return report;
}

DensityOperator DensityOperator::from_matrix(const ComplexMatrix& m, double tol) {
  const ValidationReport report = validate_density(m, tol);
  if (!report.ok) {
    throw StateValidityError("invalid density operator: " + report.describe());
  }
  return DensityOperator(m);
}

DensityOperator DensityOperator::from_update(const ComplexMatrix& m, double repair_tol) {
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  if (validate_density(h).ok) return DensityOperator(h);
  if (!h.allFinite()) throw StateValidityError("state update produced non-finite entries");
  SpectralDecomposition sd = hermitian_eigen(h);
  if (sd.eigenvalues.minCoeff() < -repair_tol) {
    return from_matrix(h);  // throws with the full report
  }
  sd.eigenvalues = sd.eigenvalues.cwiseMax(0.0);
  const double total = sd.eigenvalues.sum();
  if (!(total > 0.0)) throw StateValidityError("state update produced a zero matrix");
  sd.eigenvalues /= total;
  const ComplexMatrix r = sd.reconstruct();
  return from_matrix(0.5 * (r + r.adjoint()));
}

DensityOperator DensityOperator::basis(int dim, int index) {
  if (dim < 1 || dim > kMaxDim) throw DimensionError("basis: bad dimension");
  if (index < 0 || index >= dim) throw ParameterError("basis: index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityOperator(m);
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  if (dim < 1 || dim > kMaxDim) throw DimensionError("maximally_mixed: bad dimension");
  return DensityOperator(identity_matrix(dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw StateValidityError("pure: zero or non-finite state vector");
  }
  const ComplexVector unit = psi / norm;
  return from_matrix(unit * unit.adjoint());
}

DensityOperator DensityOperator::diagonal(const std::vector<double>& p) {
  const int dim = static_cast<int>(p.size());
  if (dim < 1 || dim > kMaxDim) throw DimensionError("diagonal: bad dimension");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = p[i];
  return from_matrix(m);
}

double DensityOperator::population(int k) const {
  if (k < 0 || k >= dim()) throw ParameterError("population: index out of range");
  return m_(k, k).real();
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma, double tol) {
  if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: dimension mismatch");
  // Eigenvalues at or below this are roundoff; keeping them would add
  // sqrt(1e-16)-sized errors to the trace of the square root.
  constexpr double kSupportTol = 1e-13;
  const SpectralDecomposition a = hermitian_eigen(rho.matrix());
  const SpectralDecomposition b = hermitian_eigen(sigma.matrix());
  auto support = [&](const SpectralDecomposition& sd) {
    int r = 0;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
      if (sd.eigenvalues[i] < -tol) {
        throw StateValidityError("fidelity: negative eigenvalue beyond tolerance");
      }
      if (sd.eigenvalues[i] > kSupportTol) ++r;
    }
    return r;
  };
  const int ra = support(a);
  const int rb = support(b);
  // F is symmetric, so sandwich the wider operator between the square root
  // of the one with the smaller support.
  const SpectralDecomposition& narrow = ra <= rb ? a : b;
  const ComplexMatrix& wide = ra <= rb ? sigma.matrix() : rho.matrix();
  const int r = std::min(ra, rb);
  const Eigen::Index n = narrow.eigenvalues.size();
  ComplexMatrix w(n, r);
  for (int j = 0; j < r; ++j) {
    const Eigen::Index col = n - r + j;  // ascending order: largest last
    w.col(j) = narrow.eigenvectors.col(col) * std::sqrt(narrow.eigenvalues[col]);
  }
  ComplexMatrix inner = w.adjoint() * wide * w;
  inner = 0.5 * (inner + inner.adjoint());
  double root_sum = 0.0;
  if (r == 1) {
    root_sum = std::sqrt(std::max(inner(0, 0).real(), 0.0));
  } else if (r > 1) {
    const RealVector lambdas = hermitian_eigen(inner).eigenvalues;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
      if (lambdas[i] < -tol) {
        throw StateValidityError("fidelity: negative eigenvalue beyond tolerance");
      }
      root_sum += std::sqrt(std::max(lambdas[i], 0.0));
    }
  }
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double fidelity_pure_target(const DensityOperator& rho, int basis_index) {
  if (basis_index < 0 || basis_index >= rho.dim()) {
    throw ParameterError("fidelity_pure_target: basis index out of range");
  }
  return std::clamp(rho.population(basis_index), 0.0, 1.0);
}

}  // namespace qfc
