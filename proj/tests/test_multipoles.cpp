#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gbloch/errors.hpp"
#include "gbloch/multipoles.hpp"
#include "test_support.hpp"

using namespace gbloch;

TEST_CASE("maximally mixed state has only the monopole") {
  for (int tj = 1; tj <= 6; ++tj) {
    const TensorBasis b(SpinSystem::from_twice(tj));
    const ComplexMatrix rho = ComplexMatrix::Identity(b.dim(), b.dim()) / double(b.dim());
    const StateMultipoles m = decompose(rho, b);
    CHECK(std::abs(m(0, 0) - 1.0 / std::sqrt(double(b.dim()))) < 1e-14);
    CHECK(m.coeffs().tail(b.size() - 1).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("spin 1/2 multipoles are the polarization vector") {
  // rho = (1 + P.sigma)/2, so rho_10 = Pz/sqrt2 and rho_1+-1 = -+(Px +- iPy)/2
  const TensorBasis b(SpinSystem::from_twice(1));
  const double px = 0.3, py = -0.4, pz = 0.5;
  ComplexMatrix rho(2, 2);
  // rows/cols ordered m = -1/2, +1/2
  rho << 0.5 * (1 - pz), 0.5 * Complex(px, py), 0.5 * Complex(px, -py), 0.5 * (1 + pz);
  const StateMultipoles m = decompose(rho, b);
  CHECK(std::abs(m(1, 0) - pz / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(m(1, 1) - (-0.5 * Complex(px, py))) < 1e-14);
  CHECK(std::abs(m(1, -1) - 0.5 * Complex(px, -py)) < 1e-14);
}

TEST_CASE("decompose and reconstruct are inverse") {
  std::mt19937_64 rng(7);
  for (int tj = 1; tj <= 6; ++tj) {
    const TensorBasis b(SpinSystem::from_twice(tj));
    const ComplexMatrix rho = testing::random_density(b.dim(), rng);
    const StateMultipoles m = decompose(rho, b);
    CHECK((reconstruct(m, b) - rho).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(m.hermiticity_deviation() < 1e-14);
    CHECK(std::abs(multipole_norm(m) - (rho * rho).trace().real()) < 1e-13);
    CHECK(clebsch_equivalence_check(rho, b) < 1e-13);
    // direct trace oracle
    for (int k = 0; k < b.size(); ++k) CHECK(std::abs(m.coeffs()(k) - (rho * b.op(k)).trace()) < 1e-13);
  }
}

TEST_CASE("non-hermitian input is detected") {
  const SpinSystem s = SpinSystem::from_twice(2);
  StateMultipoles m(s);
  m(1, 1) = Complex(0.2, 0.1);
  m(1, -1) = Complex(0.2, 0.1);
  CHECK(m.hermiticity_deviation() == doctest::Approx(std::abs(Complex(0.2, 0.1) + std::conj(Complex(0.2, 0.1)))));
  CHECK_THROWS_AS(m(3, 0), RankOutOfRange);
  CHECK_THROWS_AS(StateMultipoles(s, ComplexVector::Zero(4)), InvalidArgument);
}

TEST_CASE("coupled tensor products") {
  RankComponents a{1, {Complex(0.1, 0.2), Complex(0.3, 0), Complex(-0.1, 0.2)}};
  RankComponents b{1, {Complex(0.5, -0.1), Complex(0.2, 0), Complex(-0.5, -0.1)}};
  // [a x b]_00 = sum_m <1m 1-m|00> a_m b_-m = sum_m (-1)^(1-m)/sqrt3 a_m b_-m
  Complex scalar = 0;
  for (int m = -1; m <= 1; ++m) scalar += ((1 - m) % 2 == 0 ? 1.0 : -1.0) / std::sqrt(3.0) * a.at(m) * b.at(-m);
  CHECK(std::abs(tensor_product(a, b, 0, 0) - scalar) < 1e-15);
  CHECK(tensor_product(a, b, 3, 0) == Complex(0));
  CHECK(tensor_product(a, b, 2, 2) == a.at(1) * b.at(1));
}

TEST_CASE("angular distribution") {
  const TensorBasis b(SpinSystem::from_twice(2));
  const StateMultipoles m = decompose(ComplexMatrix::Identity(3, 3) / 3.0, b);
  AngularDistributionSpec spec;
  spec.theta = {0.0, 0.5, 1.0, std::numbers::pi};
  const auto flat = angular_distribution(m, spec);
  for (double w : flat.w) CHECK(w == doctest::Approx(1.0 / std::sqrt(3.0)));

  // pure |m=1>: rho_20 = sqrt(5/3) <1 1 2 0|1 1> = 1/sqrt6
  ComplexMatrix pure = ComplexMatrix::Zero(3, 3);
  pure(2, 2) = 1.0;
  spec.r = {{0, 1.0}, {1, 0.0}, {2, 0.5}};
  const auto w = angular_distribution(decompose(pure, b), spec);
  for (std::size_t i = 0; i < spec.theta.size(); ++i) {
    const double c = std::cos(spec.theta[i]);
    const double expected = 1.0 / std::sqrt(3.0) + 0.5 / std::sqrt(6.0) * 0.5 * (3 * c * c - 1);
    CHECK(w.w[i] == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK_FALSE(w.imaginary_warning);
  // r_L defaults to 1; odd ranks vanish for an aligned state, so W(theta) = W(pi - theta)
  ComplexMatrix aligned = ComplexMatrix::Zero(3, 3);
  aligned(0, 0) = aligned(2, 2) = 0.5;
  spec.r.clear();
  spec.theta = {0.3, std::numbers::pi - 0.3};
  const auto sym = angular_distribution(decompose(aligned, b), spec);
  CHECK(sym.w[0] == doctest::Approx(sym.w[1]).epsilon(1e-14));
  spec.r = {{5, 2.0}};
  CHECK_NOTHROW(angular_distribution(decompose(pure, b), spec));
}
