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

#include "gbloch/precession.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <mutex>
#include <sstream>

#include "gbloch/errors.hpp"

namespace gbloch {

namespace {

int parity(int n) { return (n % 2 == 0) ? 1 : -1; }

bool rank_ok(const SpinSystem& spin, int L) { return L >= 0 && L <= spin.max_rank(); }

}  // namespace

ExactCoeff reduced_matrix_element_exact(const SpinSystem& spin, int L1, int L2, int L) {
  if (!rank_ok(spin, L1) || !rank_ok(spin, L2) || !rank_ok(spin, L)) return ExactCoeff::zero();
  if ((L1 + L2 - L) % 2 == 0) return ExactCoeff::zero();  // [(-1)^(L1+L2-L) - 1] = 0
  const HalfInt j = spin.j();
  const ExactCoeff sixj = six_j(HalfInt(L1), HalfInt(L2), HalfInt(L), j, j, j);
  if (sixj.is_zero()) return ExactCoeff::zero();
  // (-1)^(2j+L) * (-2) * sqrt((2L1+1)(2L2+1)(2L+1)) * {6j}
  const int sign = parity(spin.twice_j() + L) * -1 * sixj.sign;
  mpq_class rational = sixj.rational * 4 * (2 * L1 + 1) * (2 * L2 + 1) * (2 * L + 1);
  return {sign, rational};
}

double reduced_matrix_element(const SpinSystem& spin, int L1, int L2, int L) {
  return reduced_matrix_element_exact(spin, L1, L2, L).to_double();
}

ExactCoeff structure_constant_exact(const SpinSystem& spin, int L1, int L2, int L) {
  const ExactCoeff rme = reduced_matrix_element_exact(spin, L1, L2, L);
  if (rme.is_zero()) return rme;
  return {-rme.sign, rme.rational / (2 * L + 1)};
}

double structure_constant(const SpinSystem& spin, int L1, int L2, int L) {
  return structure_constant_exact(spin, L1, L2, L).to_double();
}

StructureConstants::StructureConstants(SpinSystem spin) : spin_(spin), ranks_(spin.max_rank() + 1) {
  c_.assign(static_cast<std::size_t>(ranks_ * ranks_ * ranks_), 0.0);
  for (int L1 = 0; L1 < ranks_; ++L1)
    for (int L2 = 0; L2 < ranks_; ++L2)
      for (int L = 0; L < ranks_; ++L)
        c_[static_cast<std::size_t>((L1 * ranks_ + L2) * ranks_ + L)] = structure_constant(spin, L1, L2, L);
}

std::shared_ptr<const StructureConstants> StructureConstants::shared(SpinSystem spin) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const StructureConstants>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(spin.twice_j());
    if (it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const StructureConstants>(spin);
  std::lock_guard lock(mutex);
  return cache.emplace(spin.twice_j(), std::move(table)).first->second;
}

double StructureConstants::operator()(int L1, int L2, int L) const {
  if (L1 < 0 || L2 < 0 || L < 0 || L1 >= ranks_ || L2 >= ranks_ || L >= ranks_) return 0.0;
  return c_[static_cast<std::size_t>((L1 * ranks_ + L2) * ranks_ + L)];
}

// ---------------------------------------------------------------------------

MultipoleGenerator build_generator(const InteractionTensor& tensor, const TensorBasis& basis,
                                   GeneratorMethod method) {
  if (!(tensor.spin() == basis.spin())) throw InvalidArgument("interaction tensor and basis belong to different j");
  const SpinSystem& spin = basis.spin();
  const int n = basis.size();
  const Complex i(0.0, 1.0);
  MultipoleGenerator gen{spin, ComplexMatrix::Zero(n, n), false};

  if (method == GeneratorMethod::commutator_trace) {
    // S(k2, k) = Tr(T_k2^dagger [H, T_k]) = Tr([T_k2^dagger, H] T_k); G(k, k2) = i S(k2, k)
    const ComplexMatrix h = hamiltonian_matrix(tensor, basis);
    gen.matrix = i * tensor_superoperator(h, basis).transpose();
    return gen;
  }

  const auto c = StructureConstants::shared(spin);
  const int ranks = spin.max_rank() + 1;
  for (int L1 = 1; L1 < ranks; ++L1) {
    for (int M1 = -L1; M1 <= L1; ++M1) {
      const Complex w = tensor.omega()(multipole_index(L1, M1));
      if (w == Complex(0.0)) continue;
      for (int L2 = 0; L2 < ranks; ++L2) {
        for (int L = std::abs(L1 - L2); L <= std::min(L1 + L2, ranks - 1); ++L) {
          const double cj = (*c)(L1, L2, L);
          if (cj == 0.0) continue;
          for (int M2 = -L2; M2 <= L2; ++M2) {
            const int M = M1 + M2;
            if (std::abs(M) > L) continue;
            gen.matrix(multipole_index(L, M), multipole_index(L2, M2)) += i * cj * cg(L1, M1, L2, M2, L, M) * w;
          }
        }
      }
    }
  }
  return gen;
}

// ---------------------------------------------------------------------------

RelaxationSpec::RelaxationSpec(SpinSystem spin) : spin_(spin), rates_(Eigen::VectorXd::Zero(spin.num_multipoles())) {}

void RelaxationSpec::set_rate(int L, int M, double rate) {
  require_rank(spin_, L, M);
  if (!std::isfinite(rate) || rate < 0.0) {
    std::ostringstream msg;
    msg << "relaxation rate for (L=" << L << ", M=" << M << ") must be finite and >= 0, got " << rate;
    throw InvalidArgument(msg.str());
  }
  rates_(multipole_index(L, M)) = rate;
  rates_(multipole_index(L, -M)) = rate;
}

double RelaxationSpec::rate(int L, int M) const {
  require_rank(spin_, L, M);
  return rates_(multipole_index(L, M));
}

RelaxationSpec RelaxationSpec::from_table(SpinSystem spin, const std::map<std::pair<int, int>, double>& rates) {
  RelaxationSpec spec(spin);
  for (const auto& [lm, rate] : rates) {
    const auto [L, M] = lm;
    auto partner = rates.find({L, -M});
    if (partner != rates.end() && partner->second != rate) {
      std::ostringstream msg;
      msg << "relaxation rates must satisfy rate(L,M) = rate(L,-M) to keep rho hermitian; got rate(" << L << "," << M
          << ") = " << rate << " and rate(" << L << "," << -M << ") = " << partner->second;
      throw InvalidArgument(msg.str());
    }
    spec.set_rate(L, M, rate);
  }
  return spec;
}

RelaxationSpec RelaxationSpec::bloch(SpinSystem spin, double t1, double t2) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw InvalidArgument("T1 and T2 must be positive");
  RelaxationSpec spec(spin);
  spec.set_rate(1, 0, 1.0 / t1);
  spec.set_rate(1, 1, 1.0 / t2);
  return spec;
}

MultipoleGenerator apply_relaxation(const MultipoleGenerator& gen, const RelaxationSpec& relax) {
  if (!(gen.spin == relax.spin())) throw InvalidArgument("relaxation spec and generator belong to different j");
  if ((relax.rates().array() < 0.0).any() || !relax.rates().allFinite())
    throw InvalidArgument("relaxation rates must be finite and >= 0");
  MultipoleGenerator out = gen;
  out.matrix.diagonal() -= relax.rates().cast<Complex>();
  out.relaxation_applied = true;
  return out;
}

double generator_norm(const MultipoleGenerator& gen) {
  if (gen.matrix.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(gen.matrix);
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------

Propagator::Propagator(const MultipoleGenerator& gen) : generator_(gen.matrix) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(generator_);
  if (es.info() == Eigen::Success) {
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
    Eigen::JacobiSVD<ComplexMatrix> svd(vectors_);
    const auto& s = svd.singularValues();
    condition_ = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  } else {
    condition_ = std::numeric_limits<double>::infinity();
  }
  if (condition_ > 1e8) {
    fallback_ = true;
    std::ostringstream msg;
    msg << "eigenvector condition number " << condition_ << " exceeds 1e8; using scaling-and-squaring exponential";
    diagnostics_.push_back(msg.str());
  } else {
    lu_.compute(vectors_);
  }
}

ComplexVector Propagator::apply(const ComplexVector& rho0, double t) const {
  if (fallback_) return (generator_ * Complex(t)).exp() * rho0;
  const ComplexVector coeffs = lu_.solve(rho0);
  const ComplexVector phases = (values_ * t).array().exp();
  return vectors_ * phases.cwiseProduct(coeffs);
}

namespace {

Trajectory evolve_rk4(const MultipoleGenerator& gen, const StateMultipoles& initial, std::span<const double> times,
                      double step_factor) {
  Trajectory traj(gen.spin);
  traj.method = "rk4";
  const double norm = generator_norm(gen);
  const double h_max = norm > 0.0 ? step_factor / norm : std::numeric_limits<double>::infinity();
  const ComplexMatrix& g = gen.matrix;
  ComplexVector y = initial.coeffs();
  double t = 0.0;
  for (double target : times) {
    const double span = target - t;
    if (span > 0.0) {
      const auto steps = std::isfinite(h_max) ? static_cast<long>(std::ceil(span / h_max)) : 1L;
      const double h = span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        const ComplexVector k1 = g * y;
        const ComplexVector k2 = g * (y + 0.5 * h * k1);
        const ComplexVector k3 = g * (y + 0.5 * h * k2);
        const ComplexVector k4 = g * (y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    t = target;
    traj.times.push_back(target);
    traj.states.push_back(y);
  }
  return traj;
}

}  // namespace

Trajectory evolve(const MultipoleGenerator& gen, const StateMultipoles& initial, std::span<const double> times,
                  const EvolveOptions& options) {
  require_time_grid(times);
  if (!(initial.spin() == gen.spin)) throw InvalidArgument("initial state and generator belong to different j");
  if (options.scheme == EvolveScheme::rk4) {
    if (!(options.step_factor > 0.0) || options.step_factor > 0.05)
      throw InvalidArgument("RK4 step factor must lie in (0, 0.05]");
    return evolve_rk4(gen, initial, times, options.step_factor);
  }
  const Propagator prop(gen);
  Trajectory traj(gen.spin);
  traj.method = prop.uses_fallback() ? "expm" : "eigen";
  traj.diagnostics = prop.diagnostics();
  for (double t : times) {
    traj.times.push_back(t);
    traj.states.push_back(prop.apply(initial.coeffs(), t));
  }
  return traj;
}

}  // namespace gbloch
