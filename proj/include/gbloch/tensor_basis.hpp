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

// Normalized irreducible tensor operators T_LM for a single j multiplet and
// the tensor bra-ket calculus built on them:
//
//   (L'M'| A |LM)  = Tr{ T_L'M'^dagger [A, T_LM] }
//   (L'M'| AB |LM) = Tr{ T_L'M'^dagger [A, [B, T_LM]] }
//
// Matrices are indexed by m' (row) and m (column), both ordered -j ... +j.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "gbloch/wigner.hpp"

namespace gbloch {

using Complex = std::complex<double>;

template <typename Scalar>
using CMatrixX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrixX<double>;
using ComplexVector = CVectorX<double>;

/// A single angular momentum multiplet j with dimension 2j+1.
class SpinSystem {
 public:
  explicit SpinSystem(HalfInt j);
  static SpinSystem from_twice(int twice_j) { return SpinSystem(HalfInt::from_twice(twice_j)); }

  HalfInt j() const { return j_; }
  int twice_j() const { return j_.twice(); }
  int dim() const { return j_.twice() + 1; }
  /// Highest tensor rank, 2j.
  int max_rank() const { return j_.twice(); }
  /// Number of multipole components, (2j+1)^2.
  int num_multipoles() const { return dim() * dim(); }

  /// Row/column of projection m in the -j ... +j ordering.
  int index_of(HalfInt m) const;
  HalfInt m_at(int index) const { return HalfInt::from_twice(2 * index - j_.twice()); }

  friend bool operator==(const SpinSystem&, const SpinSystem&) = default;

 private:
  HalfInt j_;
};

/// Flattened multipole index L^2 + (L + M).
constexpr int multipole_index(int L, int M) { return L * L + L + M; }
/// Inverse of multipole_index.
std::pair<int, int> multipole_lm(int index);

/// Throws RankOutOfRange unless 0 <= L <= 2j, and InvalidArgument unless |M| <= L.
void require_rank(const SpinSystem& spin, int L, int M);

/// Spin matrices in the |jm> basis.
struct AngularMomentum {
  ComplexMatrix jz, jplus, jminus, jx, jy;
  const ComplexMatrix& cartesian(int q) const { return q == 0 ? jx : (q == 1 ? jy : jz); }
};
AngularMomentum angular_momentum(const SpinSystem& spin);

template <typename A, typename B>
typename A::PlainObject commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a * b - b * a;
}

/// Normalization constants of the L <= 2 closed forms:
/// a0 = 1/sqrt(2j+1), a1 = sqrt(3/(j(j+1)(2j+1))),
/// a2 = sqrt(20/((2j-1)2j(2j+1)(2j+2)(2j+3))). Undefined ranks are NaN.
struct NormConstants {
  double a0, a1, a2;
};
NormConstants norm_constants(const SpinSystem& spin);

/// T_LM from the Wigner-Eckart theorem with reduced element sqrt(2L+1):
/// <jm'|T_LM|jm> = sqrt((2L+1)/(2j+1)) <jm LM|jm'>.
ComplexMatrix tensor_operator(const SpinSystem& spin, int L, int M);

/// T_LM for L <= 2 from polynomials in J_z, J_+, J_-.
ComplexMatrix tensor_operator_closed_form(const SpinSystem& spin, int L, int M);

/// All (2j+1)^2 tensor operators of one multiplet. Immutable once built.
class TensorBasis {
 public:
  explicit TensorBasis(SpinSystem spin);

  /// Process-wide cache keyed on j.
  static std::shared_ptr<const TensorBasis> shared(SpinSystem spin);

  const SpinSystem& spin() const { return spin_; }
  int size() const { return spin_.num_multipoles(); }
  int dim() const { return spin_.dim(); }

  const ComplexMatrix& op(int index) const { return ops_[static_cast<std::size_t>(index)]; }
  const ComplexMatrix& op(int L, int M) const;
  const NormConstants& norm() const { return norm_; }
  const AngularMomentum& spin_matrices() const { return jmat_; }

  /// dim^2 x size matrix whose column k is the column-major vec(T_k).
  const ComplexMatrix& stacked() const { return stacked_; }

  /// Coefficients Tr(T_k^dagger X) of X in the basis {T_k}; X = sum_k c_k T_k.
  ComplexVector expand(const ComplexMatrix& x) const;

 private:
  SpinSystem spin_;
  NormConstants norm_;
  AngularMomentum jmat_;
  std::vector<ComplexMatrix> ops_;
  ComplexMatrix stacked_;
};

/// (Lp Mp| A |L M) = Tr{T_LpMp^dagger [A, T_LM]}.
Complex tensor_matrix_element(const ComplexMatrix& a, int Lp, int Mp, int L, int M, const TensorBasis& basis);

/// (Lp Mp| AB |L M) = Tr{T_LpMp^dagger [A, [B, T_LM]]}.
Complex tensor_product_element(const ComplexMatrix& a, const ComplexMatrix& b, int Lp, int Mp, int L, int M,
                               const TensorBasis& basis);

/// Full matrix S with S(k', k) = (k'| A |k) over the flattened multipole index.
ComplexMatrix tensor_superoperator(const ComplexMatrix& a, const TensorBasis& basis);

}  // namespace gbloch
