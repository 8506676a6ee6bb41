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

#include "gbloch/tensor_basis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "gbloch/errors.hpp"

namespace gbloch {

SpinSystem::SpinSystem(HalfInt j) : j_(j) { require_quantum_number(j); }

int SpinSystem::index_of(HalfInt m) const {
  require_projection(j_, m);
  return (m.twice() + j_.twice()) / 2;
}

std::pair<int, int> multipole_lm(int index) {
  int L = static_cast<int>(std::sqrt(static_cast<double>(index)));
  while (L * L > index) --L;
  while ((L + 1) * (L + 1) <= index) ++L;
  return {L, index - L * L - L};
}

void require_rank(const SpinSystem& spin, int L, int M) {
  if (L < 0 || L > spin.max_rank()) {
    std::ostringstream msg;
    msg << "tensor rank L=" << L << " outside 0 <= L <= 2j = " << spin.max_rank();
    throw RankOutOfRange(msg.str());
  }
  if (M < -L || M > L) {
    std::ostringstream msg;
    msg << "projection M=" << M << " outside -L..L for L=" << L;
    throw InvalidArgument(msg.str());
  }
}

AngularMomentum angular_momentum(const SpinSystem& spin) {
  const int n = spin.dim();
  const double j = spin.j().value();
  AngularMomentum a;
  a.jz = ComplexMatrix::Zero(n, n);
  a.jplus = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double m = spin.m_at(i).value();
    a.jz(i, i) = m;
    if (i + 1 < n) a.jplus(i + 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  a.jminus = a.jplus.adjoint();
  a.jx = 0.5 * (a.jplus + a.jminus);
  a.jy = Complex(0, -0.5) * (a.jplus - a.jminus);
  return a;
}

NormConstants norm_constants(const SpinSystem& spin) {
  const double j = spin.j().value();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  NormConstants c{};
  c.a0 = std::sqrt(1.0 / (2 * j + 1));
  c.a1 = spin.max_rank() >= 1 ? std::sqrt(3.0 / (j * (j + 1) * (2 * j + 1))) : nan;
  c.a2 = spin.max_rank() >= 2
             ? std::sqrt(20.0 / ((2 * j - 1) * (2 * j) * (2 * j + 1) * (2 * j + 2) * (2 * j + 3)))
             : nan;
  return c;
}

ComplexMatrix tensor_operator(const SpinSystem& spin, int L, int M) {
  require_rank(spin, L, M);
  const int n = spin.dim();
  const HalfInt j = spin.j();
  const double scale = std::sqrt((2.0 * L + 1) / n);
  ComplexMatrix t = ComplexMatrix::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const HalfInt m = spin.m_at(col);
    const HalfInt mp = m + HalfInt(M);
    if (!is_projection_of(mp, j)) continue;
    t(spin.index_of(mp), col) = scale * cg(j, m, HalfInt(L), HalfInt(M), j, mp);
  }
  return t;
}

ComplexMatrix tensor_operator_closed_form(const SpinSystem& spin, int L, int M) {
  require_rank(spin, L, M);
  if (L > 2) throw InvalidArgument("closed forms exist only for L <= 2");
  const auto a = norm_constants(spin);
  const auto jm = angular_momentum(spin);
  const int n = spin.dim();
  const double j = spin.j().value();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix& jpm = M >= 0 ? jm.jplus : jm.jminus;
  const double sign = M > 0 ? -1.0 : 1.0;  // the "minus-or-plus" of the odd-M forms

  switch (L) {
    case 0:
      return a.a0 * id;
    case 1:
      if (M == 0) return a.a1 * jm.jz;
      return sign * std::sqrt(0.5) * a.a1 * jpm;
    default:
      if (M == 0) return a.a2 * (3.0 * jm.jz * jm.jz - j * (j + 1) * id);
      if (std::abs(M) == 1) return sign * 0.5 * std::sqrt(6.0) * a.a2 * (jpm * jm.jz + jm.jz * jpm);
      return 0.5 * std::sqrt(6.0) * a.a2 * jpm * jpm;
  }
}

TensorBasis::TensorBasis(SpinSystem spin)
    : spin_(spin), norm_(norm_constants(spin)), jmat_(angular_momentum(spin)) {
  const int n = spin.dim();
  ops_.reserve(static_cast<std::size_t>(size()));
  stacked_.resize(n * n, size());
  for (int L = 0; L <= spin.max_rank(); ++L) {
    for (int M = -L; M <= L; ++M) {
      ops_.push_back(tensor_operator(spin, L, M));
      stacked_.col(multipole_index(L, M)) = ops_.back().reshaped();
    }
  }
}

std::shared_ptr<const TensorBasis> TensorBasis::shared(SpinSystem spin) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const TensorBasis>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(spin.twice_j());
    if (it != cache.end()) return it->second;
  }
  auto basis = std::make_shared<const TensorBasis>(spin);
  std::lock_guard lock(mutex);
  return cache.emplace(spin.twice_j(), std::move(basis)).first->second;
}

const ComplexMatrix& TensorBasis::op(int L, int M) const {
  require_rank(spin_, L, M);
  return ops_[static_cast<std::size_t>(multipole_index(L, M))];
}

ComplexVector TensorBasis::expand(const ComplexMatrix& x) const {
  if (x.rows() != dim() || x.cols() != dim()) throw InvalidArgument("matrix dimension does not match basis");
  return stacked_.adjoint() * x.reshaped();
}

namespace {

void require_same_dim(const ComplexMatrix& a, const TensorBasis& basis) {
  if (a.rows() != basis.dim() || a.cols() != basis.dim()) {
    std::ostringstream msg;
    msg << "operator is " << a.rows() << "x" << a.cols() << ", basis dimension is " << basis.dim();
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

Complex tensor_matrix_element(const ComplexMatrix& a, int Lp, int Mp, int L, int M, const TensorBasis& basis) {
  require_same_dim(a, basis);
  const ComplexMatrix& bra = basis.op(Lp, Mp);
  const ComplexMatrix& ket = basis.op(L, M);
  return (bra.adjoint() * commutator(a, ket)).trace();
}

Complex tensor_product_element(const ComplexMatrix& a, const ComplexMatrix& b, int Lp, int Mp, int L, int M,
                               const TensorBasis& basis) {
  require_same_dim(a, basis);
  require_same_dim(b, basis);
  const ComplexMatrix& bra = basis.op(Lp, Mp);
  const ComplexMatrix& ket = basis.op(L, M);
  return (bra.adjoint() * commutator(a, commutator(b, ket))).trace();
}

ComplexMatrix tensor_superoperator(const ComplexMatrix& a, const TensorBasis& basis) {
  require_same_dim(a, basis);
  const int n = basis.dim();
  ComplexMatrix images(n * n, basis.size());
  for (int k = 0; k < basis.size(); ++k) images.col(k) = commutator(a, basis.op(k)).reshaped();
  return basis.stacked().adjoint() * images;
}

}  // namespace gbloch
