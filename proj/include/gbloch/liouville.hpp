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

// Reference dynamics in the density-matrix picture: exact evolution under
// d(rho)/dt = i[rho, H], interaction-picture transforms, and a Monte Carlo
// ensemble driven by a classical fluctuating magnetic field.

#pragma once

#include <cstdint>
#include <span>

#include "gbloch/interactions.hpp"
#include "gbloch/trajectory.hpp"

namespace gbloch {

/// Throws InvalidArgument when max |H - H^dagger| > tol.
void require_hermitian(const ComplexMatrix& h, const char* what, double tol = 1e-10);

/// rho(t) = exp(-iHt) rho0 exp(iHt), which solves d(rho)/dt = i[rho, H].
MatrixTrajectory evolve_liouville(const ComplexMatrix& h, const ComplexMatrix& rho0, std::span<const double> times);

enum class PictureDirection { to_interaction, to_lab };

/// to_interaction: exp(iH_S t) X exp(-iH_S t); to_lab is the inverse.
ComplexMatrix interaction_picture_transform(const ComplexMatrix& x, const ComplexMatrix& h_s, double t,
                                            PictureDirection direction);

/// Classical random field b(t) = gamma*B_fluct(t) coupling as b(t).J.
///
/// Each cartesian component is an independent zero-mean stationary process
/// with <b_q(t) b_q(t')> = omega_f^2 exp(-|t-t'|/tau_c).
struct FluctuationModel {
  enum class Shape { exponential };

  InteractionTensor static_tensor;
  double omega_f = 0.0;  ///< rms of each component, rad/s
  double tau_c = 1.0;    ///< correlation time, s
  Shape shape = Shape::exponential;

  explicit FluctuationModel(InteractionTensor hs, double omega = 0.0, double tau = 1.0)
      : static_tensor(std::move(hs)), omega_f(omega), tau_c(tau) {}

  /// Throws InvalidArgument unless omega_f >= 0 and tau_c > 0.
  void validate() const;
  /// omega_f^2 exp(-|tau|/tau_c).
  double correlation(double tau) const;
};

struct StochasticOptions {
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  /// Field updates per output interval.
  int substeps = 1;
  /// Worker threads; 0 picks the hardware concurrency. Never changes results.
  unsigned threads = 0;
};

/// Ensemble average of decompose(rho_k(t)) over independent realizations.
///
/// `times` must be a uniform grid starting at 0. The internal step
/// h = dt/substeps must satisfy h <= tau_c/20 and h (||H_S|| + omega_f) <= 0.05.
/// The result carries per-component standard errors across trajectories.
Trajectory stochastic_evolve(const FluctuationModel& model, const ComplexMatrix& rho0, std::span<const double> times,
                             const StochasticOptions& options, const TensorBasis& basis);

/// Largest |eigenvalue| of a hermitian matrix.
double hermitian_norm(const ComplexMatrix& h);

}  // namespace gbloch
