// Shared fixtures for the unit tests.

#pragma once

#include <random>

#include "gbloch/interactions.hpp"
#include "gbloch/multipoles.hpp"

namespace gbloch::testing {

inline ComplexMatrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(n(rng), n(rng));
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline Eigen::Matrix3d random_traceless_symmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix3d a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = n(rng);
  Eigen::Matrix3d s = 0.5 * (a + a.transpose());
  s -= Eigen::Matrix3d::Identity() * s.trace() / 3.0;
  return s;
}

/// Random magnetic field plus, for j >= 1, a random field gradient.
inline InteractionTensor random_interaction(const SpinSystem& spin, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  MagneticSpec mag{1.0 + 0.5 * n(rng), Eigen::Vector3d(n(rng), n(rng), n(rng))};
  InteractionTensor t = omega_from_magnetic(mag, spin);
  if (spin.max_rank() >= 2) {
    EfgSpec efg;
    efg.phi = random_traceless_symmetric(rng);
    efg.omega_q = 0.7 * n(rng);
    t += omega_from_efg(efg, spin);
  }
  return t;
}

}  // namespace gbloch::testing
