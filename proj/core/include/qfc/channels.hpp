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

#ifndef QFC_CHANNELS_HPP_
#define QFC_CHANNELS_HPP_

// Noise channels, measurement families and the control unitary of the
// three-level testbed, plus Kraus-level application and CPTP certification.

#include <optional>
#include <string>
#include <vector>

#include "qfc/qcore.hpp"

namespace qfc {

inline constexpr int kQutritDim = 3;
// Outcomes below this probability are treated as impossible.
inline constexpr double kZeroProbability = 1e-12;
inline constexpr double kMaxEpsilon = 0.3;
inline constexpr double kMaxEpsilonOverride = 0.5;

enum class NoiseKind { kDepolarizing, kAmplitudeDamping, kRandomPermutation };

std::string to_string(NoiseKind kind);
// Accepts "depolarizing", "amplitude_damping", "random_permutation".
NoiseKind parse_noise_kind(const std::string& name);

enum class ChannelKind {
  kIdentity,
  kDepolarizing,
  kAmplitudeDamping,
  kRandomPermutation,
  kCustom
};

struct ChannelLabel {
  ChannelKind kind = ChannelKind::kCustom;
  double alpha = 0.0;

  std::string to_string() const;
};

class QuantumChannel {
 public:
  // Throws DimensionError on an empty or inconsistent Kraus list.
  QuantumChannel(std::vector<ComplexMatrix> kraus_ops, ChannelLabel label);

  const std::vector<ComplexMatrix>& kraus_ops() const { return kraus_; }
  const ChannelLabel& label() const { return label_; }
  int dim() const { return static_cast<int>(kraus_.front().rows()); }

 private:
  std::vector<ComplexMatrix> kraus_;
  ChannelLabel label_;
};

QuantumChannel identity_channel(int dim = kQutritDim);
// alpha I/3 + (1 - alpha) rho, realised with nine weighted Weyl operators.
QuantumChannel depolarizing(double alpha);
// gamma1 = 0, gamma2 = gamma3 = alpha / 2.
QuantumChannel amplitude_damping(double alpha);
QuantumChannel random_permutation(double alpha);
QuantumChannel make_noise_channel(NoiseKind kind, double alpha);

enum class MeasurementKind { kImprecise, kTerminalProjective };

class MeasurementModel {
 public:
  MeasurementModel(std::vector<ComplexMatrix> ops, MeasurementKind kind,
                   double epsilon);

  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  MeasurementKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  int num_outcomes() const { return static_cast<int>(ops_.size()); }
  int dim() const { return static_cast<int>(ops_.front().rows()); }

 private:
  std::vector<ComplexMatrix> ops_;
  // Effects M_l^dagger M_l, cached for outcome probabilities.
  std::vector<ComplexMatrix> effects_;
  MeasurementKind kind_;
  double epsilon_;

  friend RealVector outcome_probabilities(const MeasurementModel&,
                                          const ComplexMatrix&);
};

// epsilon in [0, 0.3]; allow_wide raises the cap to 0.5 (where the matrices
// stop being real).
MeasurementModel imprecise_measurement(double epsilon, bool allow_wide = false);
MeasurementModel terminal_measurement();

// Control generator a - a^dagger with beta restricted to [-1, 1].
struct ControlFamily {
  ComplexMatrix generator;
  double beta_min = -1.0;
  double beta_max = 1.0;

  static ControlFamily standard();
  bool is_anti_hermitian(double tol = kDefaultTol) const;
};

// exp(beta (a - a^dagger)). Throws ParameterError for beta outside the range.
ComplexMatrix control_unitary(const ControlFamily& family, double beta);

// Kraus-level application on raw matrices; no validation.
ComplexMatrix apply_kraus(const std::vector<ComplexMatrix>& ops,
                          const ComplexMatrix& rho);

DensityOperator apply_channel(const QuantumChannel& channel,
                              const DensityOperator& rho);

// p(l) = tr(M_l^dagger M_l rho). Negative roundoff is clipped to zero.
RealVector outcome_probabilities(const MeasurementModel& m, const ComplexMatrix& rho);
RealVector outcome_probabilities(const MeasurementModel& m, const DensityOperator& rho);

// M_l rho M_l^dagger / p(l). Throws ConditioningError when p(l) <= 1e-12.
DensityOperator condition_on_outcome(const MeasurementModel& m,
                                     const DensityOperator& rho, int outcome);

// Sum_l M_l rho M_l^dagger (the outcome-averaged measurement map).
DensityOperator average_measurement(const MeasurementModel& m,
                                    const DensityOperator& rho);

// J = sum_ij |i><j| (x) E(|i><j|), a (d^2 x d^2) matrix.
ComplexMatrix choi_matrix(const QuantumChannel& channel);
ComplexMatrix choi_matrix(const std::vector<ComplexMatrix>& kraus_ops);

struct CptpReport {
  double completeness_deviation = 0.0;   // ||sum K^dagger K - I||_max
  double choi_min_eigenvalue = 0.0;
  double partial_trace_deviation = 0.0;  // ||tr_out J - I||_max
  bool projectors_ok = true;             // only checked for projective sets

  bool ok(double completeness_tol = 1e-10, double psd_tol = 1e-9) const;
};

CptpReport certify(const QuantumChannel& channel);
CptpReport certify(const MeasurementModel& measurement);

}  // namespace qfc

#endif  // QFC_CHANNELS_HPP_
