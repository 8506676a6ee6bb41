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

// Generalized precession in multipole space.
//
// The equation of motion d(rho_LM)/dt = sum G[(L,M),(L2,M2)] rho_L2M2 is
// assembled either from tensor traces,
//
//   G[(L,M),(L2,M2)] = i Tr([T_L2M2^dagger, H] T_LM),
//
// or from the recoupling form
//
//   G[(L,M),(L2,M2)] = i sum_{L1,M1} c_j(L1,L2,L) <L1 M1 L2 M2|L M> Omega_L1M1,
//   c_j(L1,L2,L) = -(L||T_L1||L2) / sqrt(2L+1),
//   (L||T_L1||L2) = (-1)^(2j+L) [(-1)^(L1+L2-L) - 1]
//                   sqrt((2L1+1)(2L2+1)(2L+1)) {L1 L2 L; j j j}.
//
// The trace form is the reference; the two must agree entrywise.

#pragma once

#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "gbloch/interactions.hpp"
#include "gbloch/trajectory.hpp"

namespace gbloch {

/// (L||T_L1||L2) in exact arithmetic; zero by selection rules when L1+L2+L is
/// even, a triad fails, or a rank exceeds 2j.
ExactCoeff reduced_matrix_element_exact(const SpinSystem& spin, int L1, int L2, int L);
double reduced_matrix_element(const SpinSystem& spin, int L1, int L2, int L);

/// c_j(L1,L2,L) in exact arithmetic.
ExactCoeff structure_constant_exact(const SpinSystem& spin, int L1, int L2, int L);
double structure_constant(const SpinSystem& spin, int L1, int L2, int L);

/// Table of c_j(L1,L2,L) for all ranks 0..2j of one multiplet.
class StructureConstants {
 public:
  explicit StructureConstants(SpinSystem spin);
  static std::shared_ptr<const StructureConstants> shared(SpinSystem spin);

  const SpinSystem& spin() const { return spin_; }
  /// Zero for ranks outside 0..2j.
  double operator()(int L1, int L2, int L) const;

 private:
  SpinSystem spin_;
  int ranks_;
  std::vector<double> c_;
};

enum class GeneratorMethod { structure_constants, commutator_trace };

/// Dense (2j+1)^2 x (2j+1)^2 generator acting on flattened multipole vectors.
struct MultipoleGenerator {
  SpinSystem spin;
  ComplexMatrix matrix;
  bool relaxation_applied = false;
};

MultipoleGenerator build_generator(const InteractionTensor& tensor, const TensorBasis& basis,
                                   GeneratorMethod method = GeneratorMethod::commutator_trace);

/// Per-component decay rates 1/tau_LM (s^-1), symmetric in M.
class RelaxationSpec {
 public:
  explicit RelaxationSpec(SpinSystem spin);

  /// Builds from a table keyed on (L, M). A missing (L,-M) mirrors (L,M);
  /// present but different partners, negative or non-finite rates throw.
  static RelaxationSpec from_table(SpinSystem spin, const std::map<std::pair<int, int>, double>& rates);
  /// 1/T1 on (1,0) and 1/T2 on (1,+-1); all other ranks undamped.
  static RelaxationSpec bloch(SpinSystem spin, double t1, double t2);

  /// Sets rate(L, M) and rate(L, -M).
  void set_rate(int L, int M, double rate);
  double rate(int L, int M) const;

  const SpinSystem& spin() const { return spin_; }
  const Eigen::VectorXd& rates() const { return rates_; }

 private:
  SpinSystem spin_;
  Eigen::VectorXd rates_;
};

/// G' = G - diag(1/tau_LM).
MultipoleGenerator apply_relaxation(const MultipoleGenerator& gen, const RelaxationSpec& relax);

/// Largest singular value of the generator.
double generator_norm(const MultipoleGenerator& gen);

/// Exact propagation exp(G t) rho0 for a fixed generator.
///
/// Uses the eigendecomposition of G; when the eigenvector matrix is worse
/// conditioned than 1e8 it switches to scaling-and-squaring exponentials and
/// records a diagnostic.
class Propagator {
 public:
  explicit Propagator(const MultipoleGenerator& gen);

  ComplexVector apply(const ComplexVector& rho0, double t) const;
  bool uses_fallback() const { return fallback_; }
  double eigenvector_condition() const { return condition_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  ComplexMatrix generator_;
  ComplexMatrix vectors_;
  ComplexVector values_;
  Eigen::PartialPivLU<ComplexMatrix> lu_;
  double condition_ = 1.0;
  bool fallback_ = false;
  std::vector<std::string> diagnostics_;
};

enum class EvolveScheme { eigen, rk4 };

struct EvolveOptions {
  EvolveScheme scheme = EvolveScheme::eigen;
  /// RK4 step is at most step_factor / ||G||.
  double step_factor = 0.01;
};

Trajectory evolve(const MultipoleGenerator& gen, const StateMultipoles& initial, std::span<const double> times,
                  const EvolveOptions& options = {});

}  // namespace gbloch
