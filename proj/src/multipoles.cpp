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

#include "gbloch/multipoles.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <sstream>

#include "gbloch/errors.hpp"

namespace gbloch {

StateMultipoles::StateMultipoles(SpinSystem spin)
    : spin_(spin), coeffs_(ComplexVector::Zero(spin.num_multipoles())) {}

StateMultipoles::StateMultipoles(SpinSystem spin, ComplexVector coeffs) : spin_(spin), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != spin_.num_multipoles()) {
    std::ostringstream msg;
    msg << "multipole vector has length " << coeffs_.size() << ", expected (2j+1)^2 = " << spin_.num_multipoles();
    throw InvalidArgument(msg.str());
  }
}

Complex StateMultipoles::operator()(int L, int M) const {
  require_rank(spin_, L, M);
  return coeffs_(multipole_index(L, M));
}

Complex& StateMultipoles::operator()(int L, int M) {
  require_rank(spin_, L, M);
  return coeffs_(multipole_index(L, M));
}

double StateMultipoles::hermiticity_deviation() const { return gbloch::hermiticity_deviation(coeffs_); }

double hermiticity_deviation(const ComplexVector& coeffs) {
  double worst = 0.0;
  for (int k = 0; k < coeffs.size(); ++k) {
    const auto [L, M] = multipole_lm(k);
    const double phase = (M % 2 == 0) ? 1.0 : -1.0;
    worst = std::max(worst, std::abs(coeffs(multipole_index(L, -M)) - phase * std::conj(coeffs(k))));
  }
  return worst;
}

StateMultipoles decompose(const ComplexMatrix& rho, const TensorBasis& basis) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim())
    throw InvalidArgument("density matrix dimension does not match basis");
  // Tr(rho T) = sum_ab rho_ab T_ba = vec(rho^T) . vec(T)
  const ComplexMatrix rho_t = rho.transpose();
  return StateMultipoles(basis.spin(), basis.stacked().transpose() * rho_t.reshaped());
}

ComplexMatrix reconstruct(const StateMultipoles& mult, const TensorBasis& basis) {
  if (!(mult.spin() == basis.spin())) throw InvalidArgument("multipoles and basis belong to different j");
  // vec(T^dagger) = conj(vec(T^T)), so vec(rho^T) = conj(S) c
  const ComplexVector flat_t = basis.stacked().conjugate() * mult.coeffs();
  return flat_t.reshaped(basis.dim(), basis.dim()).transpose();
}

double clebsch_equivalence_check(const ComplexMatrix& rho, const TensorBasis& basis) {
  const StateMultipoles trace_form = decompose(rho, basis);
  const SpinSystem& spin = basis.spin();
  const HalfInt j = spin.j();
  const int n = spin.dim();
  double worst = 0.0;
  for (int L = 0; L <= spin.max_rank(); ++L) {
    const double scale = std::sqrt((2.0 * L + 1) / n);
    for (int M = -L; M <= L; ++M) {
      Complex acc = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const HalfInt m = spin.m_at(a);
          const HalfInt mp = spin.m_at(b);
          if (m + HalfInt(M) != mp) continue;
          acc += scale * cg(j, m, HalfInt(L), HalfInt(M), j, mp) * rho(a, b);
        }
      }
      worst = std::max(worst, std::abs(acc - trace_form(L, M)));
    }
  }
  return worst;
}

RankComponents rank_slice(const ComplexVector& coeffs, int L) {
  if (L < 0 || multipole_index(L, L) >= coeffs.size()) {
    std::ostringstream msg;
    msg << "rank " << L << " not present in a vector of length " << coeffs.size();
    throw RankOutOfRange(msg.str());
  }
  RankComponents r;
  r.rank = L;
  for (int M = -L; M <= L; ++M) r.values.push_back(coeffs(multipole_index(L, M)));
  return r;
}

Complex tensor_product(const RankComponents& a, const RankComponents& b, int L, int M) {
  const int L1 = a.rank;
  const int L2 = b.rank;
  if (L < std::abs(L1 - L2) || L > L1 + L2 || std::abs(M) > L) return 0.0;
  Complex acc = 0.0;
  for (int M1 = -L1; M1 <= L1; ++M1) {
    const int M2 = M - M1;
    if (std::abs(M2) > L2) continue;
    acc += cg(L1, M1, L2, M2, L, M) * a.at(M1) * b.at(M2);
  }
  return acc;
}

double AngularDistributionSpec::coefficient(int L) const {
  auto it = r.find(L);
  if (it != r.end()) return it->second;
  return 1.0;
}

AngularDistribution angular_distribution(const StateMultipoles& mult, const AngularDistributionSpec& spec) {
  for (const auto& [L, value] : spec.r) {
    if (!std::isfinite(value)) throw InvalidArgument("angular distribution coefficient r_L is not finite");
    if (L < 0) throw InvalidArgument("angular distribution rank must be non-negative");
  }
  AngularDistribution out;
  out.theta = spec.theta;
  out.w.assign(spec.theta.size(), 0.0);
  for (int L = 0; L <= mult.spin().max_rank(); ++L) {
    const double rl = spec.coefficient(L);
    if (rl == 0.0) continue;
    const Complex rho_l0 = mult(L, 0);
    out.max_imaginary = std::max(out.max_imaginary, std::abs(rho_l0.imag()));
    for (std::size_t i = 0; i < spec.theta.size(); ++i)
      out.w[i] += rl * rho_l0.real() * boost::math::legendre_p(L, std::cos(spec.theta[i]));
  }
  out.imaginary_warning = out.max_imaginary > 1e-9;
  return out;
}

double multipole_norm(const ComplexVector& coeffs) { return coeffs.squaredNorm(); }
double multipole_norm(const StateMultipoles& mult) { return multipole_norm(mult.coeffs()); }

}  // namespace gbloch
