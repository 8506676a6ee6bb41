#include <doctest.h>

#include <cmath>

#include "gbloch/errors.hpp"
#include "gbloch/tensor_basis.hpp"

using namespace gbloch;

TEST_CASE("flattened multipole index") {
  int k = 0;
  for (int L = 0; L <= 4; ++L)
    for (int M = -L; M <= L; ++M, ++k) {
      CHECK(multipole_index(L, M) == k);
      CHECK(multipole_lm(k) == std::pair{L, M});
    }
}

TEST_CASE("spin matrices") {
  const SpinSystem s = SpinSystem::from_twice(3);
  const auto jm = angular_momentum(s);
  CHECK(s.dim() == 4);
  CHECK(jm.jz(0, 0).real() == -1.5);
  CHECK(jm.jz(3, 3).real() == 1.5);
  // J+ |3/2 -3/2> = sqrt(3) |3/2 -1/2>
  CHECK(jm.jplus(1, 0).real() == doctest::Approx(std::sqrt(3.0)));
  const ComplexMatrix j2 = jm.jx * jm.jx + jm.jy * jm.jy + jm.jz * jm.jz;
  CHECK((j2 - 3.75 * ComplexMatrix::Identity(4, 4)).norm() < 1e-13);
  CHECK((commutator(jm.jx, jm.jy) - Complex(0, 1) * jm.jz).norm() < 1e-13);
}

TEST_CASE("spin 1/2 tensors in explicit form") {
  const SpinSystem s = SpinSystem::from_twice(1);
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix t00 = ComplexMatrix::Identity(2, 2) * r;
  ComplexMatrix t10(2, 2), t11(2, 2);
  t10 << -r, 0, 0, r;
  t11 << 0, 0, -1, 0;  // -J+ in the (-1/2, +1/2) ordering
  CHECK((tensor_operator(s, 0, 0) - t00).norm() < 1e-15);
  CHECK((tensor_operator(s, 1, 0) - t10).norm() < 1e-15);
  CHECK((tensor_operator(s, 1, 1) - t11).norm() < 1e-15);
  CHECK((tensor_operator(s, 1, -1) - (-t11.adjoint())).norm() < 1e-15);
}

TEST_CASE("orthonormality, conjugation and commutation relations") {
  for (int tj = 1; tj <= 8; ++tj) {
    const TensorBasis b(SpinSystem::from_twice(tj));
    const auto& jm = b.spin_matrices();
    const ComplexMatrix gram = b.stacked().adjoint() * b.stacked();
    CHECK((gram - ComplexMatrix::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
    for (int L = 0; L <= tj; ++L)
      for (int M = -L; M <= L; ++M) {
        const ComplexMatrix& t = b.op(L, M);
        const double sign = M % 2 == 0 ? 1.0 : -1.0;
        CHECK((b.op(L, -M) - sign * t.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((commutator(jm.jz, t) - double(M) * t).cwiseAbs().maxCoeff() < 1e-12);
        if (M < L) {
          const double c = std::sqrt(double(L * (L + 1) - M * (M + 1)));
          CHECK((commutator(jm.jplus, t) - c * b.op(L, M + 1)).cwiseAbs().maxCoeff() < 1e-12);
        }
        if (M > -L) {
          const double c = std::sqrt(double(L * (L + 1) - M * (M - 1)));
          CHECK((commutator(jm.jminus, t) - c * b.op(L, M - 1)).cwiseAbs().maxCoeff() < 1e-12);
        }
      }
  }
}

TEST_CASE("closed forms agree with the Wigner-Eckart construction") {
  for (int tj = 1; tj <= 10; ++tj) {
    const SpinSystem s = SpinSystem::from_twice(tj);
    for (int L = 0; L <= std::min(2, tj); ++L)
      for (int M = -L; M <= L; ++M)
        CHECK((tensor_operator(s, L, M) - tensor_operator_closed_form(s, L, M)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("normalization constants") {
  const auto n = norm_constants(SpinSystem::from_twice(2));
  CHECK(n.a0 == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(n.a1 == doctest::Approx(std::sqrt(0.5)));
  CHECK(n.a2 == doctest::Approx(std::sqrt(20.0 / (1 * 2 * 3 * 4 * 5))));
  CHECK(std::isnan(norm_constants(SpinSystem::from_twice(1)).a2));
}

TEST_CASE("rank limits") {
  const SpinSystem s = SpinSystem::from_twice(1);
  CHECK_THROWS_AS(tensor_operator(s, 2, 0), RankOutOfRange);
  CHECK_THROWS_AS(tensor_operator(s, 1, 2), InvalidArgument);
  CHECK_THROWS_AS(require_rank(SpinSystem::from_twice(2), 3, 0), RankOutOfRange);
}

TEST_CASE("tensor bra-ket elements") {
  const TensorBasis b(SpinSystem::from_twice(2));
  const auto& jm = b.spin_matrices();
  // (1M|Jz|1M) = M, ranks untouched
  for (int M = -1; M <= 1; ++M) CHECK(std::abs(tensor_matrix_element(jm.jz, 1, M, 1, M, b) - double(M)) < 1e-13);
  // Casimir: sum_q (LM|J_q J_q|LM) = L(L+1)
  for (int L = 0; L <= 2; ++L) {
    Complex acc = 0;
    for (int q = 0; q < 3; ++q) acc += tensor_product_element(jm.cartesian(q), jm.cartesian(q), L, 0, L, 0, b);
    CHECK(std::abs(acc - double(L * (L + 1))) < 1e-12);
  }
  const ComplexMatrix s = tensor_superoperator(jm.jx, b);
  for (int kp = 0; kp < b.size(); ++kp)
    for (int k = 0; k < b.size(); ++k) {
      const auto [Lp, Mp] = multipole_lm(kp);
      const auto [L, M] = multipole_lm(k);
      CHECK(std::abs(s(kp, k) - tensor_matrix_element(jm.jx, Lp, Mp, L, M, b)) < 1e-13);
    }
}

TEST_CASE("expansion in the tensor basis") {
  const TensorBasis b(SpinSystem::from_twice(3));
  ComplexMatrix x = ComplexMatrix::Random(4, 4);
  const ComplexVector c = b.expand(x);
  ComplexMatrix back = ComplexMatrix::Zero(4, 4);
  for (int k = 0; k < b.size(); ++k) back += c(k) * b.op(k);
  CHECK((back - x).norm() < 1e-12);
  CHECK(TensorBasis::shared(b.spin()).get() == TensorBasis::shared(b.spin()).get());
}
