#include <doctest.h>

#include <cmath>

#include "gbloch/errors.hpp"
#include "gbloch/liouville.hpp"
#include "gbloch/precession.hpp"
#include "test_support.hpp"

using namespace gbloch;

namespace {

std::vector<double> grid(double t_max, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("structure constants: tabulated and selection rules") {
  // spin 1/2: {1 1 1; 1/2 1/2 1/2} = -1/3, so (1||T_1||1) = -2 sqrt27 (-1/3) = 2 sqrt3 and c = -2
  const SpinSystem half = SpinSystem::from_twice(1);
  CHECK(six_j(HalfInt(1), HalfInt(1), HalfInt(1), HalfInt::from_twice(1), HalfInt::from_twice(1), HalfInt::from_twice(1)) ==
        ExactCoeff{-1, mpq_class(1, 9)});
  CHECK(structure_constant_exact(half, 1, 1, 1) == ExactCoeff{-1, mpq_class(4)});
  CHECK(structure_constant_exact(half, 1, 0, 1).is_zero());
  for (int tj = 1; tj <= 8; ++tj) {
    const SpinSystem s = SpinSystem::from_twice(tj);
    for (int L1 = 0; L1 <= tj; ++L1)
      for (int L2 = 0; L2 <= tj; ++L2)
        for (int L = 0; L <= tj; ++L) {
          const ExactCoeff c = structure_constant_exact(s, L1, L2, L);
          const bool triad = L <= L1 + L2 && L >= std::abs(L1 - L2);
          if ((L1 + L2 + L) % 2 == 0 || !triad) CHECK(c.is_zero());
          if (L1 == 1 && L2 != L) CHECK(c.is_zero());
          if (L1 == 2 && std::abs(L2 - L) != 1) CHECK(c.is_zero());
        }
  }
}

TEST_CASE("magnetic structure constant reproduces J_z") {
  // G(LM, LM) = i c(1,L,L) <1 0 L M|L M> Omega_10 must equal i (LM|a1 J_z|LM) Omega_10 = i a1 M Omega_10
  for (int tj = 1; tj <= 6; ++tj) {
    const SpinSystem s = SpinSystem::from_twice(tj);
    const double a1 = norm_constants(s).a1;
    for (int L = 1; L <= tj; ++L) CHECK(structure_constant(s, 1, L, L) * cg(1, 0, L, L, L, L) == doctest::Approx(a1 * L));
  }
}

TEST_CASE("generator paths agree and follow the Liouville equation") {
  std::mt19937_64 rng(5);
  for (int tj = 1; tj <= 5; ++tj) {
    const TensorBasis b(SpinSystem::from_twice(tj));
    const InteractionTensor t = testing::random_interaction(b.spin(), rng);
    const auto g_trace = build_generator(t, b, GeneratorMethod::commutator_trace);
    const auto g_struct = build_generator(t, b, GeneratorMethod::structure_constants);
    CHECK((g_trace.matrix - g_struct.matrix).cwiseAbs().maxCoeff() < 1e-12);

    // brute force: d/dt rho_k = Tr(i[rho, H] T_k) with rho = T_k2^dagger
    const ComplexMatrix h = hamiltonian_matrix(t, b);
    for (int k = 0; k < b.size(); ++k)
      for (int k2 = 0; k2 < b.size(); ++k2) {
        const ComplexMatrix rho = b.op(k2).adjoint();
        const Complex expected = (Complex(0, 1) * commutator(rho, h) * b.op(k)).trace();
        CHECK(std::abs(g_trace.matrix(k, k2) - expected) < 1e-12);
      }
  }
}

TEST_CASE("generator of a pure field is rank diagonal") {
  const TensorBasis b(SpinSystem::from_twice(4));
  const auto g = build_generator(omega_from_magnetic({1.3, Eigen::Vector3d(0.2, -0.5, 0.9)}, b.spin()), b);
  for (int k = 0; k < b.size(); ++k)
    for (int k2 = 0; k2 < b.size(); ++k2)
      if (multipole_lm(k).first != multipole_lm(k2).first) CHECK(std::abs(g.matrix(k, k2)) < 1e-14);
}

TEST_CASE("eigen propagation matches the Liouville oracle") {
  std::mt19937_64 rng(9);
  for (int tj = 1; tj <= 5; ++tj) {
    const TensorBasis b(SpinSystem::from_twice(tj));
    const InteractionTensor t = testing::random_interaction(b.spin(), rng);
    const auto g = build_generator(t, b);
    const ComplexMatrix rho0 = testing::random_density(b.dim(), rng);
    const auto times = grid(50.0 / generator_norm(g), 41);
    const Trajectory mult = evolve(g, decompose(rho0, b), times);
    const Trajectory oracle = decompose(evolve_liouville(hamiltonian_matrix(t, b), rho0, times), b);
    CHECK(max_deviation(mult, oracle) < 1e-10);
    CHECK(mult.method == "eigen");
  }
}

TEST_CASE("RK4 agrees with the exact propagator") {
  std::mt19937_64 rng(13);
  const TensorBasis b(SpinSystem::from_twice(2));
  const auto g = build_generator(testing::random_interaction(b.spin(), rng), b);
  const StateMultipoles init = decompose(testing::random_density(3, rng), b);
  const auto times = grid(10.0 / generator_norm(g), 11);
  const Trajectory exact = evolve(g, init, times);
  const Trajectory rk = evolve(g, init, times, {EvolveScheme::rk4, 0.01});
  CHECK(rk.method == "rk4");
  CHECK(max_deviation(exact, rk) < 1e-9);
  CHECK_THROWS_AS(evolve(g, init, times, {EvolveScheme::rk4, 0.1}), InvalidArgument);
}

TEST_CASE("Larmor precession of spin 1/2") {
  const TensorBasis b(SpinSystem::from_twice(1));
  const double w = 2.5;
  const auto g = build_generator(omega_from_magnetic({w, Eigen::Vector3d(0, 0, 1)}, b.spin()), b);
  StateMultipoles init(b.spin());
  init(0, 0) = 1.0 / std::sqrt(2.0);
  init(1, 1) = Complex(-0.3, 0.1);
  init(1, -1) = Complex(0.3, 0.1);
  init(1, 0) = 0.2;
  const auto times = grid(4.0, 17);
  const Trajectory tr = evolve(g, init, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (int M = -1; M <= 1; ++M) {
      const Complex expected = std::exp(Complex(0, M * w * times[i])) * init(1, M);
      CHECK(std::abs(tr.at(i)(1, M) - expected) < 1e-13);
    }
  }
}

TEST_CASE("Bloch relaxation closed form") {
  const TensorBasis b(SpinSystem::from_twice(1));
  const double w = 3.0, t1 = 2.0, t2 = 0.7;
  auto g = build_generator(omega_from_magnetic({w, Eigen::Vector3d(0, 0, 1)}, b.spin()), b);
  g = apply_relaxation(g, RelaxationSpec::bloch(b.spin(), t1, t2));
  CHECK(g.relaxation_applied);
  StateMultipoles init(b.spin());
  init(0, 0) = 1.0 / std::sqrt(2.0);
  init(1, 0) = 0.3;
  init(1, 1) = Complex(-0.25, 0.05);
  init(1, -1) = Complex(0.25, 0.05);
  const auto times = grid(5 * t2, 51);
  const Trajectory tr = evolve(g, init, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    CHECK(std::abs(tr.at(i)(1, 0) - init(1, 0) * std::exp(-t / t1)) < 1e-12);
    CHECK(std::abs(tr.at(i)(1, 1) - init(1, 1) * std::exp(Complex(-1.0 / t2, w) * t)) < 1e-12);
    CHECK(std::abs(tr.at(i)(0, 0) - init(0, 0)) < 1e-12);
  }
}

TEST_CASE("relaxation spec validation") {
  const SpinSystem s = SpinSystem::from_twice(2);
  CHECK_THROWS_AS(RelaxationSpec::from_table(s, {{{1, 0}, -1.0}}), InvalidArgument);
  CHECK_THROWS_AS(RelaxationSpec::from_table(s, {{{1, 1}, 1.0}, {{1, -1}, 2.0}}), InvalidArgument);
  CHECK_THROWS_AS(RelaxationSpec::from_table(s, {{{3, 0}, 1.0}}), RankOutOfRange);
  const auto spec = RelaxationSpec::from_table(s, {{{2, 1}, 0.4}});
  CHECK(spec.rate(2, -1) == 0.4);
  CHECK(spec.rate(2, 0) == 0.0);
  CHECK_THROWS_AS(RelaxationSpec::bloch(s, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("defective generator falls back to the matrix exponential") {
  MultipoleGenerator g{SpinSystem::from_twice(1), ComplexMatrix::Zero(4, 4)};
  g.matrix(1, 2) = 1.0;  // Jordan block
  const Propagator p(g);
  CHECK(p.uses_fallback());
  CHECK_FALSE(p.diagnostics().empty());
  ComplexVector x = ComplexVector::Zero(4);
  x(2) = 1.0;
  const ComplexVector y = p.apply(x, 2.0);
  CHECK(std::abs(y(1) - 2.0) < 1e-14);
  CHECK(std::abs(y(2) - 1.0) < 1e-14);
}

TEST_CASE("time grid validation") {
  const TensorBasis b(SpinSystem::from_twice(1));
  const auto g = build_generator(InteractionTensor(b.spin()), b);
  const StateMultipoles init(b.spin());
  const std::vector<double> bad{0.0, 1.0, 0.5};
  CHECK_THROWS_AS(evolve(g, init, bad), InvalidArgument);
  const std::vector<double> negative{-1.0, 0.0};
  CHECK_THROWS_AS(evolve(g, init, negative), InvalidArgument);
}
