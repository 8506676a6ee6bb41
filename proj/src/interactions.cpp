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

#include "gbloch/interactions.hpp"

#include <cmath>
#include <sstream>

#include "gbloch/errors.hpp"

namespace gbloch {

EfgSpec EfgSpec::from_coupling(double eq, const Eigen::Matrix3d& phi, const SpinSystem& spin) {
  const double j = spin.j().value();
  if (spin.max_rank() < 2) throw RankOutOfRange("quadrupole coupling needs rank 2 <= 2j, i.e. j >= 1");
  EfgSpec s;
  s.phi = phi;
  s.omega_q = eq * phi(2, 2) / (4.0 * j * (2.0 * j - 1.0));
  return s;
}

EfgSpec EfgSpec::axial(double omega_q, double eta) {
  EfgSpec s;
  s.phi = Eigen::Vector3d(-0.5 * (1.0 - eta), -0.5 * (1.0 + eta), 1.0).asDiagonal();
  s.omega_q = omega_q;
  return s;
}

InteractionTensor::InteractionTensor(SpinSystem spin)
    : spin_(spin), omega_(ComplexVector::Zero(spin.num_multipoles())) {}

Complex InteractionTensor::operator()(int L, int M) const {
  require_rank(spin_, L, M);
  return omega_(multipole_index(L, M));
}

void InteractionTensor::set(int L, int M, Complex value) {
  require_rank(spin_, L, M);
  omega_(multipole_index(L, M)) = value;
}

int InteractionTensor::max_rank_present() const {
  int rank = 0;
  for (int k = 0; k < omega_.size(); ++k)
    if (omega_(k) != Complex(0.0)) rank = std::max(rank, multipole_lm(k).first);
  return rank;
}

double InteractionTensor::hermiticity_deviation() const {
  double worst = 0.0;
  for (int k = 0; k < omega_.size(); ++k) {
    const auto [L, M] = multipole_lm(k);
    const double phase = (M % 2 == 0) ? 1.0 : -1.0;
    worst = std::max(worst, std::abs(omega_(multipole_index(L, -M)) - phase * std::conj(omega_(k))));
  }
  return worst;
}

InteractionTensor& InteractionTensor::operator+=(const InteractionTensor& other) {
  if (!(spin_ == other.spin_)) throw InvalidArgument("cannot add interaction tensors of different j");
  omega_ += other.omega_;
  warnings_.insert(warnings_.end(), other.warnings_.begin(), other.warnings_.end());
  return *this;
}

InteractionTensor omega_from_magnetic(const MagneticSpec& spec, const SpinSystem& spin) {
  if (!std::isfinite(spec.gamma) || !spec.field.allFinite())
    throw InvalidArgument("magnetic field and gyromagnetic ratio must be finite");
  InteractionTensor t(spin);
  if (spin.max_rank() < 1) return t;
  const double a1 = norm_constants(spin).a1;
  const double g = spec.gamma;
  const Eigen::Vector3d& b = spec.field;
  t.set(1, 0, g * b.z() / a1);
  t.set(1, 1, -g * Complex(b.x(), b.y()) / (std::sqrt(2.0) * a1));
  t.set(1, -1, g * Complex(b.x(), -b.y()) / (std::sqrt(2.0) * a1));
  return t;
}

InteractionTensor omega_from_efg(const EfgSpec& spec, const SpinSystem& spin) {
  if (spin.max_rank() < 2) {
    std::ostringstream msg;
    msg << "quadrupole interaction is a rank-2 tensor and needs L <= 2j; j = " << spin.j() << " only allows L <= "
        << spin.max_rank();
    throw RankOutOfRange(msg.str());
  }
  if (!spec.phi.allFinite() || !std::isfinite(spec.omega_q))
    throw InvalidArgument("field gradient and omega_Q must be finite");
  const Eigen::Matrix3d phi = 0.5 * (spec.phi + spec.phi.transpose());
  if ((spec.phi - phi).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, phi.cwiseAbs().maxCoeff()))
    throw InvalidArgument("field gradient tensor must be symmetric");
  const double zz = phi(2, 2);
  if (zz == 0.0) throw InvalidArgument("field gradient component phi_zz must be nonzero");

  InteractionTensor t(spin);
  const double scale = spec.omega_q / norm_constants(spin).a2 / zz;
  const double s6 = std::sqrt(6.0);
  t.set(2, 0, scale * (2 * zz - phi(0, 0) - phi(1, 1)) / 3.0);
  // The off-axis gradient enters with a factor 2 relative to the transverse
  // anisotropy, as required for H to equal the cartesian quadrupole coupling
  // in every frame.
  t.set(2, 1, -scale * 2.0 * Complex(phi(2, 0), phi(2, 1)) / s6);
  t.set(2, -1, scale * 2.0 * Complex(phi(2, 0), -phi(2, 1)) / s6);
  t.set(2, 2, scale * Complex(phi(0, 0) - phi(1, 1), 2 * phi(0, 1)) / s6);
  t.set(2, -2, scale * Complex(phi(0, 0) - phi(1, 1), -2 * phi(0, 1)) / s6);

  const double trace = phi.trace();
  if (std::abs(trace) > 1e-9 * phi.norm()) {
    std::ostringstream msg;
    msg << "field gradient is not traceless (Tr phi = " << trace << "); the trace part is ignored by the coupling";
    t.add_warning(msg.str());
  }
  return t;
}

ComplexMatrix hamiltonian_matrix(const InteractionTensor& tensor, const TensorBasis& basis) {
  if (!(tensor.spin() == basis.spin())) throw InvalidArgument("interaction tensor and basis belong to different j");
  const int n = basis.dim();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int k = 1; k < basis.size(); ++k) {
    const Complex w = tensor.omega()(k);
    if (w != Complex(0.0)) h += w * basis.op(k).adjoint();
  }
  return h;
}

}  // namespace gbloch
