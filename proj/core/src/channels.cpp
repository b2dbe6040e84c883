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

#include "qfc/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qfc/errors.hpp"

namespace qfc {
namespace {

void require_unit_interval(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream os;
    os << what << ": alpha must lie in [0, 1], got " << value;
    throw ParameterError(os.str());
  }
}

ComplexMatrix zero3() { return ComplexMatrix::Zero(kQutritDim, kQutritDim); }

// |i><j| on C^3 with a given weight.
ComplexMatrix unit(int i, int j, double weight = 1.0) {
  ComplexMatrix m = zero3();
  m(i, j) = weight;
  return m;
}

// Shift X|k> = |k+1 mod 3>, the first cyclic permutation printed for the
// random permutation channel.
ComplexMatrix cyclic_shift() {
  ComplexMatrix m = zero3();
  m(1, 0) = 1.0;
  m(2, 1) = 1.0;
  m(0, 2) = 1.0;
  return m;
}

ComplexMatrix clock() {
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  ComplexMatrix m = zero3();
  m(0, 0) = 1.0;
  m(1, 1) = omega;
  m(2, 2) = omega * omega;
  return m;
}

ComplexMatrix completeness_sum(const std::vector<ComplexMatrix>& ops) {
  const int d = static_cast<int>(ops.front().rows());
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : ops) sum += k.adjoint() * k;
  return sum;
}

void verify_depolarizing(const QuantumChannel& ch, double alpha) {
  // Linear maps agree iff they agree on every matrix unit |i><j|.
  double worst = 0.0;
  for (int i = 0; i < kQutritDim; ++i) {
    for (int j = 0; j < kQutritDim; ++j) {
      const ComplexMatrix in = unit(i, j);
      ComplexMatrix expected = (1.0 - alpha) * in;
      if (i == j) expected += alpha * identity_matrix(kQutritDim) / 3.0;
      worst = std::max(worst, max_abs(apply_kraus(ch.kraus_ops(), in) - expected));
    }
  }
  if (worst > 1e-12) {
    throw Error("depolarizing: Kraus set does not reproduce the affine map");
  }
}

}  // namespace

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kDepolarizing:
      return "depolarizing";
    case NoiseKind::kAmplitudeDamping:
      return "amplitude_damping";
    case NoiseKind::kRandomPermutation:
      return "random_permutation";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "depolarizing") return NoiseKind::kDepolarizing;
  if (name == "amplitude_damping") return NoiseKind::kAmplitudeDamping;
  if (name == "random_permutation") return NoiseKind::kRandomPermutation;
  throw ParameterError("unknown noise kind '" + name + "'");
}

std::string ChannelLabel::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case ChannelKind::kIdentity:
      os << "identity";
      break;
    case ChannelKind::kDepolarizing:
      os << "depolarizing";
      break;
    case ChannelKind::kAmplitudeDamping:
      os << "amplitude_damping";
      break;
    case ChannelKind::kRandomPermutation:
      os << "random_permutation";
      break;
    case ChannelKind::kCustom:
      os << "custom";
      break;
  }
  os << "(alpha=" << alpha << ")";
  return os.str();
}

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus_ops, ChannelLabel label)
    : kraus_(std::move(kraus_ops)), label_(label) {
  if (kraus_.empty()) throw DimensionError("QuantumChannel: empty Kraus list");
  const auto d = kraus_.front().rows();
  for (const auto& k : kraus_) {
    if (k.rows() != d || k.cols() != d) {
      throw DimensionError("QuantumChannel: inconsistent Kraus shapes");
    }
  }
}

QuantumChannel identity_channel(int dim) {
  return QuantumChannel({identity_matrix(dim)}, {ChannelKind::kIdentity, 0.0});
}

QuantumChannel depolarizing(double alpha) {
  require_unit_interval(alpha, "depolarizing");
  // (1/9) sum_W W rho W^dagger over the nine Weyl operators X^a Z^b equals
  // tr(rho) I/3, so weight alpha/9 on the eight non-identity ones and
  // 1 - 8 alpha/9 on the identity gives the affine form.
  const ComplexMatrix x = cyclic_shift();
  const ComplexMatrix z = clock();
  std::vector<ComplexMatrix> ops;
  ops.reserve(9);
  ops.push_back(std::sqrt(1.0 - 8.0 * alpha / 9.0) * identity_matrix(kQutritDim));
  const double w = std::sqrt(alpha / 9.0);
  ComplexMatrix xa = identity_matrix(kQutritDim);
  for (int a = 0; a < 3; ++a) {
    ComplexMatrix zb = identity_matrix(kQutritDim);
    for (int b = 0; b < 3; ++b) {
      if (a != 0 || b != 0) ops.push_back(w * xa * zb);
      zb = zb * z;
    }
    xa = xa * x;
  }
  QuantumChannel ch(std::move(ops), {ChannelKind::kDepolarizing, alpha});
  verify_depolarizing(ch, alpha);
  return ch;
}

QuantumChannel amplitude_damping(double alpha) {
  require_unit_interval(alpha, "amplitude_damping");
  const double gamma1 = 0.0;
  const double gamma2 = alpha / 2.0;
  const double gamma3 = alpha / 2.0;

  ComplexMatrix n0 = zero3();
  n0(0, 0) = 1.0;
  n0(1, 1) = std::sqrt(1.0 - gamma1);
  n0(2, 2) = std::sqrt(std::max(0.0, 1.0 - gamma2 - gamma3));
  // Names follow the printed operator labels; N_03 moves |2> to |0>.
  const ComplexMatrix n01 = unit(0, 1, std::sqrt(gamma1));
  const ComplexMatrix n12 = unit(1, 2, std::sqrt(gamma2));
  const ComplexMatrix n03 = unit(0, 2, std::sqrt(gamma3));
  return QuantumChannel({n0, n01, n12, n03}, {ChannelKind::kAmplitudeDamping, alpha});
}

QuantumChannel random_permutation(double alpha) {
  require_unit_interval(alpha, "random_permutation");
  const ComplexMatrix p1 = cyclic_shift();
  const ComplexMatrix p2 = p1 * p1;
  return QuantumChannel(
      {std::sqrt(1.0 - 2.0 * alpha / 3.0) * identity_matrix(kQutritDim),
       std::sqrt(alpha / 3.0) * p1, std::sqrt(alpha / 3.0) * p2},
      {ChannelKind::kRandomPermutation, alpha});
}

QuantumChannel make_noise_channel(NoiseKind kind, double alpha) {
  switch (kind) {
    case NoiseKind::kDepolarizing:
      return depolarizing(alpha);
    case NoiseKind::kAmplitudeDamping:
      return amplitude_damping(alpha);
    case NoiseKind::kRandomPermutation:
      return random_permutation(alpha);
  }
  throw ParameterError("make_noise_channel: unknown kind");
}

MeasurementModel::MeasurementModel(std::vector<ComplexMatrix> ops,
                                   MeasurementKind kind, double epsilon)
    : ops_(std::move(ops)), kind_(kind), epsilon_(epsilon) {
  if (ops_.empty()) throw DimensionError("MeasurementModel: no operators");
  effects_.reserve(ops_.size());
  for (const auto& m : ops_) {
    if (m.rows() != ops_.front().rows() || m.cols() != m.rows()) {
      throw DimensionError("MeasurementModel: inconsistent operator shapes");
    }
    effects_.push_back(m.adjoint() * m);
  }
}

MeasurementModel imprecise_measurement(double epsilon, bool allow_wide) {
  const double cap = allow_wide ? kMaxEpsilonOverride : kMaxEpsilon;
  if (!(epsilon >= 0.0 && epsilon <= cap)) {
    std::ostringstream os;
    os << "imprecise_measurement: epsilon must lie in [0, " << cap << "], got "
       << epsilon;
    throw ParameterError(os.str());
  }
  const double hit = std::sqrt(1.0 - 2.0 * epsilon);
  const double miss = std::sqrt(epsilon);
  std::vector<ComplexMatrix> ops;
  for (int l = 0; l < kQutritDim; ++l) {
    ComplexMatrix m = zero3();
    for (int k = 0; k < kQutritDim; ++k) m(k, k) = (k == l) ? hit : miss;
    ops.push_back(m);
  }
  return MeasurementModel(std::move(ops), MeasurementKind::kImprecise, epsilon);
}

MeasurementModel terminal_measurement() {
  std::vector<ComplexMatrix> ops;
  for (int l = 0; l < kQutritDim; ++l) ops.push_back(unit(l, l));
  return MeasurementModel(std::move(ops), MeasurementKind::kTerminalProjective, 0.0);
}

ControlFamily ControlFamily::standard() {
  ComplexMatrix a = zero3();
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  ControlFamily family;
  family.generator = a - a.adjoint();
  return family;
}

bool ControlFamily::is_anti_hermitian(double tol) const {
  return max_abs(generator + generator.adjoint()) <= tol;
}

ComplexMatrix control_unitary(const ControlFamily& family, double beta) {
  if (!(beta >= family.beta_min && beta <= family.beta_max)) {
    std::ostringstream os;
    os << "control_unitary: beta must lie in [" << family.beta_min << ", "
       << family.beta_max << "], got " << beta;
    throw ParameterError(os.str());
  }
  return matrix_exponential(beta * family.generator);
}

ComplexMatrix apply_kraus(const std::vector<ComplexMatrix>& ops, const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : ops) out.noalias() += k * rho * k.adjoint();
  return out;
}

DensityOperator apply_channel(const QuantumChannel& channel, const DensityOperator& rho) {
  if (channel.dim() != rho.dim()) throw DimensionError("apply_channel: dimension mismatch");
  return DensityOperator::from_update(apply_kraus(channel.kraus_ops(), rho.matrix()));
}

RealVector outcome_probabilities(const MeasurementModel& m, const ComplexMatrix& rho) {
  if (m.dim() != rho.rows()) {
    throw DimensionError("outcome_probabilities: dimension mismatch");
  }
  RealVector p(m.num_outcomes());
  for (int l = 0; l < m.num_outcomes(); ++l) {
    // tr(E rho) = sum_ij E_ij rho_ji
    const Complex tr = (m.effects_[l].array() * rho.transpose().array()).sum();
    p[l] = std::max(0.0, tr.real());
  }
  return p;
}

RealVector outcome_probabilities(const MeasurementModel& m, const DensityOperator& rho) {
  return outcome_probabilities(m, rho.matrix());
}

DensityOperator condition_on_outcome(const MeasurementModel& m,
                                     const DensityOperator& rho, int outcome) {
  if (m.dim() != rho.dim()) throw DimensionError("condition_on_outcome: dimension mismatch");
  if (outcome < 0 || outcome >= m.num_outcomes()) {
    throw ParameterError("condition_on_outcome: outcome index out of range");
  }
  const ComplexMatrix& op = m.ops()[outcome];
  const ComplexMatrix post = op * rho.matrix() * op.adjoint();
  const double p = post.trace().real();
  if (!(p > kZeroProbability)) {
    std::ostringstream os;
    os << "condition_on_outcome: outcome " << outcome << " has probability " << p;
    throw ConditioningError(os.str());
  }
  return DensityOperator::from_update(post / p);
}

DensityOperator average_measurement(const MeasurementModel& m, const DensityOperator& rho) {
  if (m.dim() != rho.dim()) throw DimensionError("average_measurement: dimension mismatch");
  return DensityOperator::from_update(apply_kraus(m.ops(), rho.matrix()));
}

ComplexMatrix choi_matrix(const std::vector<ComplexMatrix>& kraus_ops) {
  if (kraus_ops.empty()) throw DimensionError("choi_matrix: empty Kraus list");
  const int d = static_cast<int>(kraus_ops.front().rows());
  if (d * d > kMaxDim) throw DimensionError("choi_matrix: dimension too large");
  ComplexMatrix j = ComplexMatrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(a, b) = 1.0;
      j.block(a * d, b * d, d, d) = apply_kraus(kraus_ops, e);
    }
  }
  return j;
}

ComplexMatrix choi_matrix(const QuantumChannel& channel) {
  return choi_matrix(channel.kraus_ops());
}

bool CptpReport::ok(double completeness_tol, double psd_tol) const {
  return completeness_deviation <= completeness_tol &&
         choi_min_eigenvalue >= -psd_tol && partial_trace_deviation <= psd_tol &&
         projectors_ok;
}

namespace {

CptpReport certify_ops(const std::vector<ComplexMatrix>& ops) {
  const int d = static_cast<int>(ops.front().rows());
  CptpReport report;
  report.completeness_deviation =
      max_abs(completeness_sum(ops) - identity_matrix(d));
  const ComplexMatrix j = choi_matrix(ops);
  report.choi_min_eigenvalue = hermitian_eigen(0.5 * (j + j.adjoint())).eigenvalues.minCoeff();
  // Trace out the output factor: block (a, b) contributes tr(E(|a><b|)).
  ComplexMatrix reduced = ComplexMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) reduced(a, b) = j.block(a * d, b * d, d, d).trace();
  }
  report.partial_trace_deviation = max_abs(reduced - identity_matrix(d));
  return report;
}

}  // namespace

CptpReport certify(const QuantumChannel& channel) {
  return certify_ops(channel.kraus_ops());
}

CptpReport certify(const MeasurementModel& measurement) {
  CptpReport report = certify_ops(measurement.ops());
  if (measurement.kind() == MeasurementKind::kTerminalProjective) {
    for (const auto& m : measurement.ops()) {
      if (max_abs(m * m - m) > kDefaultTol || max_abs(m - m.adjoint()) > kDefaultTol) {
        report.projectors_ok = false;
      }
    }
  }
  return report;
}

}  // namespace qfc
