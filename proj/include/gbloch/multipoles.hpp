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

// State multipoles rho_LM = Tr(rho T_LM) and their inverse rho = sum rho_LM T_LM^dagger.

#pragma once

#include <map>
#include <vector>

#include "gbloch/tensor_basis.hpp"

namespace gbloch {

/// Multipole coefficients of one multiplet, stored at multipole_index(L, M).
class StateMultipoles {
 public:
  explicit StateMultipoles(SpinSystem spin);
  StateMultipoles(SpinSystem spin, ComplexVector coeffs);

  const SpinSystem& spin() const { return spin_; }
  const ComplexVector& coeffs() const { return coeffs_; }
  ComplexVector& coeffs() { return coeffs_; }

  Complex operator()(int L, int M) const;
  Complex& operator()(int L, int M);

  /// max |rho_{L,-M} - (-1)^M conj(rho_LM)|.
  double hermiticity_deviation() const;

 private:
  SpinSystem spin_;
  ComplexVector coeffs_;
};

/// max |v_{L,-M} - (-1)^M conj(v_LM)| for a flattened multipole vector.
double hermiticity_deviation(const ComplexVector& coeffs);

StateMultipoles decompose(const ComplexMatrix& rho, const TensorBasis& basis);
ComplexMatrix reconstruct(const StateMultipoles& mult, const TensorBasis& basis);

/// Largest difference between the trace form Tr(rho T_LM) and the direct
/// Clebsch-Gordan double sum sqrt((2L+1)/(2j+1)) <jm LM|jm'> <jm|rho|jm'>.
double clebsch_equivalence_check(const ComplexMatrix& rho, const TensorBasis& basis);

/// Components of a single-rank irreducible set, indexed by M + L.
struct RankComponents {
  int rank = 0;
  std::vector<Complex> values;

  Complex at(int M) const { return values[static_cast<std::size_t>(M + rank)]; }
};

/// Rank-L slice of a flattened multipole (or interaction) vector.
RankComponents rank_slice(const ComplexVector& coeffs, int L);

/// [A_L1 x B_L2]_LM = sum_{M1+M2=M} <L1 M1 L2 M2|L M> A_L1M1 B_L2M2.
/// Exact zero outside the triangle range.
Complex tensor_product(const RankComponents& a, const RankComponents& b, int L, int M);

struct AngularDistributionSpec {
  std::map<int, double> r;  ///< r_L; ranks absent from the map default to 1
  std::vector<double> theta;  ///< radians

  double coefficient(int L) const;
};

struct AngularDistribution {
  std::vector<double> theta;
  std::vector<double> w;
  /// Set when some |Im rho_L0| exceeds 1e-9.
  bool imaginary_warning = false;
  double max_imaginary = 0.0;
};

/// W(theta) = sum_L r_L Re(rho_L0) P_L(cos theta) for an axially symmetric setup.
/// Coefficients for ranks above 2j have nothing to multiply and are ignored.
AngularDistribution angular_distribution(const StateMultipoles& mult, const AngularDistributionSpec& spec);

/// sum |rho_LM|^2, equal to Tr(rho^2).
double multipole_norm(const StateMultipoles& mult);
double multipole_norm(const ComplexVector& coeffs);

}  // namespace gbloch
