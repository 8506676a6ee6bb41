/* Copyright 2026 The gbloch Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Interaction tensors Omega_LM with H = sum_LM Omega_LM T_LM^dagger, built
// from a magnetic field (rank 1) and an electric field gradient (rank 2).
// All frequencies are angular (rad/s), hbar = 1.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "gbloch/tensor_basis.hpp"

namespace gbloch {

struct MagneticSpec {
  double gamma = 0.0;                        ///< rad s^-1 T^-1
  Eigen::Vector3d field = Eigen::Vector3d::Zero();  ///< (Bx, By, Bz) in T
};

struct EfgSpec {
  Eigen::Matrix3d phi = Eigen::Matrix3d::Zero();  ///< second derivatives phi_ab of the potential
  double omega_q = 0.0;  ///< e phi_zz Q / (4j(2j-1))

  /// omega_Q from the coupling e*Q and the field gradient.
  static EfgSpec from_coupling(double eq, const Eigen::Matrix3d& phi, const SpinSystem& spin);
  /// Principal-axis gradient with asymmetry eta, assuming |phi_zz| >= |phi_yy| >= |phi_xx|:
  /// phi = diag(-(1-eta)/2, -(1+eta)/2, 1).
  static EfgSpec axial(double omega_q, double eta = 0.0);
};

/// Omega_LM over the flattened multipole index of one multiplet.
class InteractionTensor {
 public:
  explicit InteractionTensor(SpinSystem spin);

  const SpinSystem& spin() const { return spin_; }
  const ComplexVector& omega() const { return omega_; }

  Complex operator()(int L, int M) const;
  /// Throws RankOutOfRange when L > 2j.
  void set(int L, int M, Complex value);

  /// Highest rank with a nonzero component (0 when empty).
  int max_rank_present() const;
  /// max |Omega_{L,-M} - (-1)^M conj(Omega_LM)|.
  double hermiticity_deviation() const;

  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  InteractionTensor& operator+=(const InteractionTensor& other);
  friend InteractionTensor operator+(InteractionTensor a, const InteractionTensor& b) { return a += b; }

 private:
  SpinSystem spin_;
  ComplexVector omega_;
  std::vector<std::string> warnings_;
};

/// Rank-1 tensor: Omega_10 = gamma Bz / a1, Omega_1+-1 = -+gamma (Bx +- i By) / (sqrt2 a1).
InteractionTensor omega_from_magnetic(const MagneticSpec& spec, const SpinSystem& spin);

/// Rank-2 tensor of the quadrupole coupling; requires j >= 1 and phi_zz != 0.
InteractionTensor omega_from_efg(const EfgSpec& spec, const SpinSystem& spin);

/// H = sum Omega_LM T_LM^dagger. Rank-0 components only shift the global phase
/// and are skipped.
ComplexMatrix hamiltonian_matrix(const InteractionTensor& tensor, const TensorBasis& basis);

}  // namespace gbloch
