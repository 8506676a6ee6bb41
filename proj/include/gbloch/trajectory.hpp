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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbloch/multipoles.hpp"

namespace gbloch {

/// Throws InvalidArgument unless times are strictly increasing and start at t >= 0.
void require_time_grid(std::span<const double> times);

/// Multipole vectors sampled at increasing times.
struct Trajectory {
  SpinSystem spin;
  std::vector<double> times;
  std::vector<ComplexVector> states;
  std::string method;
  std::vector<std::string> diagnostics;
  std::optional<std::uint64_t> seed;
  /// Standard errors of the real and imaginary parts (stochastic runs only).
  std::vector<Eigen::VectorXd> stderr_re, stderr_im;

  explicit Trajectory(SpinSystem s) : spin(s) {}
  std::size_t size() const { return times.size(); }
  StateMultipoles at(std::size_t i) const { return StateMultipoles(spin, states[i]); }
  /// One multipole component over time.
  std::vector<Complex> component(int L, int M) const;
};

/// Density matrices sampled at increasing times.
struct MatrixTrajectory {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;
  std::string method;
};

/// Decomposes every density matrix of a matrix trajectory.
Trajectory decompose(const MatrixTrajectory& traj, const TensorBasis& basis);

/// max over times and components of |a - b|.
double max_deviation(const Trajectory& a, const Trajectory& b);

}  // namespace gbloch
