#include <doctest.h>

#include <cmath>

#include "gbloch/errors.hpp"
#include "gbloch/liouville.hpp"
#include "test_support.hpp"

using namespace gbloch;

namespace {

std::vector<double> grid(double t_max, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("Liouville evolution solves d(rho)/dt = i[rho, H]") {
  std::mt19937_64 rng(21);
  const TensorBasis b(SpinSystem::from_twice(3));
  const ComplexMatrix h = hamiltonian_matrix(testing::random_interaction(b.spin(), rng), b);
  const ComplexMatrix rho0 = testing::random_density(4, rng);
  const double t = 0.8, dt = 1e-5;
  const std::vector<double> times{t - dt, t, t + dt};
  const auto tr = evolve_liouville(h, rho0, times);
  const ComplexMatrix derivative = (tr.states[2] - tr.states[0]) / (2 * dt);
  const ComplexMatrix rhs = Complex(0, 1) * commutator(tr.states[1], h);
  CHECK((derivative - rhs).cwiseAbs().maxCoeff() < 1e-8);
  // unitary: spectrum of rho unchanged
  CHECK(std::abs((tr.states[1] * tr.states[1]).trace() - (rho0 * rho0).trace()) < 1e-13);
  CHECK_THROWS_AS(evolve_liouville(h + ComplexMatrix::Identity(4, 4) * Complex(0, 1), rho0, times), InvalidArgument);
}

TEST_CASE("interaction picture") {
  const TensorBasis b(SpinSystem::from_twice(2));
  const auto& jm = b.spin_matrices();
  const double w = 1.7, t = 0.9;
  const ComplexMatrix hs = w * jm.jz;
  // exp(i w Jz t) J+ exp(-i w Jz t) = exp(i w t) J+
  const ComplexMatrix jp = interaction_picture_transform(jm.jplus, hs, t, PictureDirection::to_interaction);
  CHECK((jp - std::exp(Complex(0, w * t)) * jm.jplus).cwiseAbs().maxCoeff() < 1e-14);
  const ComplexMatrix back = interaction_picture_transform(jp, hs, t, PictureDirection::to_lab);
  CHECK((back - jm.jplus).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("fluctuation model validation") {
  const InteractionTensor none(SpinSystem::from_twice(1));
  CHECK_THROWS_AS(FluctuationModel(none, -1.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FluctuationModel(none, 1.0, 0.0).validate(), InvalidArgument);
  const FluctuationModel m(none, 2.0, 0.5);
  CHECK(m.correlation(0.0) == 4.0);
  CHECK(m.correlation(-0.5) == doctest::Approx(4.0 * std::exp(-1.0)));
}

TEST_CASE("stochastic ensemble without fluctuations is the coherent evolution") {
  std::mt19937_64 rng(4);
  const TensorBasis b(SpinSystem::from_twice(2));
  const InteractionTensor hs = omega_from_magnetic({1.0, Eigen::Vector3d(0.3, 0.0, 1.0)}, b.spin());
  const ComplexMatrix rho0 = testing::random_density(3, rng);
  const auto times = grid(1.0, 41);
  StochasticOptions opt;
  opt.n_traj = 3;
  opt.substeps = 2;
  const Trajectory st = stochastic_evolve(FluctuationModel(hs, 0.0, 1.0), rho0, times, opt, b);
  const Trajectory ref = decompose(evolve_liouville(hamiltonian_matrix(hs, b), rho0, times), b);
  CHECK(max_deviation(st, ref) < 1e-12);
  CHECK(st.stderr_re.back().maxCoeff() < 1e-12);
}

TEST_CASE("stochastic results do not depend on thread count") {
  std::mt19937_64 rng(8);
  const TensorBasis b(SpinSystem::from_twice(2));
  const FluctuationModel model(InteractionTensor(b.spin()), 1.0, 0.2);
  const ComplexMatrix rho0 = testing::random_density(3, rng);
  const auto times = grid(0.2, 21);
  StochasticOptions opt;
  opt.n_traj = 100;
  opt.seed = 42;
  opt.threads = 1;
  const Trajectory one = stochastic_evolve(model, rho0, times, opt, b);
  opt.threads = 4;
  const Trajectory four = stochastic_evolve(model, rho0, times, opt, b);
  CHECK(max_deviation(one, four) == 0.0);
  opt.seed = 43;
  const Trajectory other = stochastic_evolve(model, rho0, times, opt, b);
  CHECK(max_deviation(one, other) > 0.0);
  // every realization is unitary, so the monopole is exact
  for (const auto& s : one.states) CHECK(std::abs(s(0) - decompose(rho0, b).coeffs()(0)) < 1e-13);
}

TEST_CASE("stochastic step preconditions") {
  const TensorBasis b(SpinSystem::from_twice(2));
  const FluctuationModel model(InteractionTensor(b.spin()), 1.0, 0.1);
  const ComplexMatrix rho0 = ComplexMatrix::Identity(3, 3) / 3.0;
  StochasticOptions opt;
  CHECK_THROWS_AS(stochastic_evolve(model, rho0, grid(1.0, 11), opt, b), InvalidArgument);  // h = 0.1 > tau_c/20
  opt.substeps = 20;
  CHECK_NOTHROW(stochastic_evolve(model, rho0, grid(1.0, 11), opt, b));
  const std::vector<double> uneven{0.0, 0.001, 0.003};
  CHECK_THROWS_AS(stochastic_evolve(model, rho0, uneven, opt, b), InvalidArgument);
}
