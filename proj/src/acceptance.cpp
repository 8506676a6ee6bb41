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

#include "gbloch/acceptance.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "gbloch/analysis.hpp"
#include "gbloch/liouville.hpp"
#include "gbloch/precession.hpp"
#include "gbloch/relaxation_rates.hpp"

namespace gbloch {

namespace {

constexpr int kMaxTwiceJRandom = 5;
constexpr int kCasesPerJ = 20;

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::vector<double> grid(double t_max, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (n - 1);
  return t;
}

ComplexMatrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(n(rng), n(rng));
  const ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Eigen::Matrix3d random_traceless_symmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix3d a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = n(rng);
  Eigen::Matrix3d s = 0.5 * (a + a.transpose());
  s -= Eigen::Matrix3d::Identity() * s.trace() / 3.0;
  return s;
}

// Dipole (magnetic) plus, where the rank is available, a quadrupole coupling.
InteractionTensor random_interaction(const SpinSystem& spin, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  InteractionTensor t = omega_from_magnetic({1.0 + 0.5 * n(rng), Eigen::Vector3d(n(rng), n(rng), n(rng))}, spin);
  if (spin.max_rank() >= 2) {
    EfgSpec efg;
    efg.phi = random_traceless_symmetric(rng);
    efg.omega_q = 0.7 * n(rng);
    t += omega_from_efg(efg, spin);
  }
  return t;
}

struct RandomCase {
  int twice_j;
  InteractionTensor hs;
  ComplexMatrix rho0;
};

const std::vector<RandomCase>& random_cases() {
  static const std::vector<RandomCase> cases = [] {
    std::vector<RandomCase> out;
    std::mt19937_64 rng(20260321);
    for (int tj = 1; tj <= kMaxTwiceJRandom; ++tj) {
      const SpinSystem spin = SpinSystem::from_twice(tj);
      for (int c = 0; c < kCasesPerJ; ++c) {
        InteractionTensor hs = random_interaction(spin, rng);
        out.push_back({tj, std::move(hs), random_density(spin.dim(), rng)});
      }
    }
    return out;
  }();
  return cases;
}

struct CoherentRun {
  Trajectory generator_path;
  Trajectory oracle;
};

const std::vector<CoherentRun>& coherent_runs() {
  static const std::vector<CoherentRun> runs = [] {
    std::vector<CoherentRun> out;
    for (const auto& c : random_cases()) {
      const TensorBasis& basis = *TensorBasis::shared(SpinSystem::from_twice(c.twice_j));
      const MultipoleGenerator gen = build_generator(c.hs, basis);
      const auto times = grid(50.0 / generator_norm(gen), 201);
      Trajectory a = evolve(gen, decompose(c.rho0, basis), times);
      Trajectory b = decompose(evolve_liouville(hamiltonian_matrix(c.hs, basis), c.rho0, times), basis);
      out.push_back({std::move(a), std::move(b)});
    }
    return out;
  }();
  return runs;
}

CriterionResult oracle_equivalence() {
  double worst = 0.0;
  for (const auto& r : coherent_runs()) worst = std::max(worst, max_deviation(r.generator_path, r.oracle));
  return {1, "oracle equivalence", worst <= 1e-8,
          format("%zu cases, 2j=1..%d, |G| t_max=50, max deviation %.3g (limit 1e-8)", coherent_runs().size(),
                 kMaxTwiceJRandom, worst)};
}

CriterionResult dual_generator() {
  double worst = 0.0;
  for (const auto& c : random_cases()) {
    const TensorBasis& basis = *TensorBasis::shared(SpinSystem::from_twice(c.twice_j));
    const auto a = build_generator(c.hs, basis, GeneratorMethod::structure_constants);
    const auto b = build_generator(c.hs, basis, GeneratorMethod::commutator_trace);
    worst = std::max(worst, (a.matrix - b.matrix).cwiseAbs().maxCoeff());
  }
  return {2, "dual generator construction", worst <= 1e-10,
          format("%zu cases, max entry difference %.3g (limit 1e-10)", random_cases().size(), worst)};
}

CriterionResult bloch_reduction() {
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> n(0.0, 1.0);
  double norm_drift = 0.0, freq_err = 0.0, coupling = 0.0;
  int runs = 0;
  for (int tj = 1; tj <= kMaxTwiceJRandom; ++tj) {
    const TensorBasis& basis = *TensorBasis::shared(SpinSystem::from_twice(tj));
    for (int c = 0; c < 3; ++c, ++runs) {
      const double gamma = 0.5 + std::abs(n(rng));
      const Eigen::Vector3d field(n(rng), n(rng), n(rng));
      const InteractionTensor hs = omega_from_magnetic({gamma, field}, basis.spin());
      const MultipoleGenerator gen = build_generator(hs, basis);
      for (int r = 0; r < basis.size(); ++r)
        for (int k = 0; k < basis.size(); ++k)
          if ((multipole_lm(r).first == 1) != (multipole_lm(k).first == 1))
            coupling = std::max(coupling, std::abs(gen.matrix(r, k)));

      // Polarization perpendicular to B, so its autocorrelation is cos(gamma |B| t).
      Eigen::Vector3d perp = field.cross(Eigen::Vector3d(n(rng), n(rng), n(rng))).normalized();
      const auto& jm = basis.spin_matrices();
      const ComplexMatrix pj = perp.x() * jm.jx + perp.y() * jm.jy + perp.z() * jm.jz;
      ComplexVector rho0 = decompose(random_density(basis.dim(), rng), basis).coeffs();
      const ComplexVector p1 = decompose(pj, basis).coeffs();
      for (int M = -1; M <= 1; ++M) rho0(multipole_index(1, M)) = 0.3 * p1(multipole_index(1, M)) / p1.norm();
      const StateMultipoles init(basis.spin(), rho0);

      const double omega = gamma * field.norm();
      const auto times = grid(20.0 * std::numbers::pi / omega, 201);
      const Trajectory tr = evolve(gen, init, times);
      const auto polarization = [](const ComplexVector& v) { return v.segment(1, 3).norm(); };
      for (const auto& s : tr.states) norm_drift = std::max(norm_drift, std::abs(polarization(s) - polarization(rho0)));

      const Propagator prop(gen);
      const ComplexVector r1 = rho0.segment(1, 3);
      const auto autocorr = [&](double t) {
        return (r1.adjoint() * prop.apply(rho0, t).segment(1, 3))(0).real() / r1.squaredNorm();
      };
      const double fitted = zero_crossing_frequency(autocorr, 0.0, times.back());
      freq_err = std::max(freq_err, std::abs(fitted - omega) / omega);
    }
  }
  const bool ok = norm_drift <= 1e-10 && freq_err <= 1e-6 && coupling <= 1e-12;
  return {3, "Bloch reduction", ok,
          format("%d fields, 2j=1..%d: |P| drift %.3g (1e-10), frequency rel. error %.3g (1e-6), rank-1 coupling %.3g "
                 "(1e-12)",
                 runs, kMaxTwiceJRandom, norm_drift, freq_err, coupling)};
}

CriterionResult bloch_relaxation() {
  std::mt19937_64 rng(777);
  const double omega = 3.0, t1 = 2.0, t2 = 0.7;
  double worst = 0.0;
  for (int tj = 1; tj <= 3; ++tj) {
    const TensorBasis& basis = *TensorBasis::shared(SpinSystem::from_twice(tj));
    MultipoleGenerator gen = build_generator(omega_from_magnetic({omega, Eigen::Vector3d(0, 0, 1)}, basis.spin()), basis);
    gen = apply_relaxation(gen, RelaxationSpec::bloch(basis.spin(), t1, t2));
    const StateMultipoles init = decompose(random_density(basis.dim(), rng), basis);
    const auto times = grid(5.0 * t2, 101);
    const Trajectory tr = evolve(gen, init, times);
    for (std::size_t i = 0; i < times.size(); ++i)
      for (int k = 0; k < basis.size(); ++k) {
        const auto [L, M] = multipole_lm(k);
        const double decay = L != 1 ? 0.0 : (M == 0 ? 1.0 / t1 : 1.0 / t2);
        const Complex expected = init.coeffs()(k) * std::exp(Complex(-decay, M * omega) * times[i]);
        worst = std::max(worst, std::abs(tr.states[i](k) - expected));
      }
  }
  return {4, "Bloch relaxation", worst <= 1e-8,
          format("2j=1..3, B along z, T1=%g T2=%g over 5 T2: max deviation from closed form %.3g (limit 1e-8)", t1, t2,
                 worst)};
}

CriterionResult selection_rules() {
  int violations = 0, nonzero = 0, checked = 0;
  for (int tj = 1; tj <= 8; ++tj) {
    const SpinSystem spin = SpinSystem::from_twice(tj);
    for (int l1 = 0; l1 <= tj; ++l1)
      for (int l2 = 0; l2 <= tj; ++l2)
        for (int l = 0; l <= tj; ++l) {
          ++checked;
          const bool zero = structure_constant_exact(spin, l1, l2, l).is_zero();
          if (!zero) ++nonzero;
          const bool triangle = l >= std::abs(l1 - l2) && l <= l1 + l2;
          bool must_vanish = (l1 + l2 + l) % 2 == 0 || !triangle;
          if (l1 == 1 && l != l2) must_vanish = true;
          if (l1 == 2 && std::abs(l - l2) != 1) must_vanish = true;
          if (must_vanish && !zero) ++violations;
        }
  }
  return {5, "selection rules", violations == 0,
          format("2j=1..8, %d exact structure constants (%d nonzero), %d selection-rule violations", checked, nonzero,
                 violations)};
}

CriterionResult basis_integrity() {
  double ortho = 0.0, comm = 0.0, closed = 0.0;
  for (int tj = 1; tj <= 25; ++tj) {
    const TensorBasis basis(SpinSystem::from_twice(tj));
    const auto& jm = basis.spin_matrices();
    const ComplexMatrix gram = basis.stacked().adjoint() * basis.stacked();
    ortho = std::max(ortho, (gram - ComplexMatrix::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff());
    for (int L = 0; L <= tj; ++L)
      for (int M = -L; M <= L; ++M) {
        const ComplexMatrix& t = basis.op(L, M);
        comm = std::max(comm, (commutator(jm.jz, t) - double(M) * t).cwiseAbs().maxCoeff());
        const ComplexMatrix up = commutator(jm.jplus, t);
        const ComplexMatrix down = commutator(jm.jminus, t);
        const double cu = std::sqrt(double(L * (L + 1) - M * (M + 1)));
        const double cd = std::sqrt(double(L * (L + 1) - M * (M - 1)));
        comm = std::max(comm, (M < L ? (up - cu * basis.op(L, M + 1)) : up).cwiseAbs().maxCoeff());
        comm = std::max(comm, (M > -L ? (down - cd * basis.op(L, M - 1)) : down).cwiseAbs().maxCoeff());
        if (L <= 2)
          closed = std::max(closed, (t - tensor_operator_closed_form(basis.spin(), L, M)).cwiseAbs().maxCoeff());
      }
  }
  const bool ok = ortho <= 1e-12 && comm <= 1e-12 && closed <= 1e-12;
  return {6, "basis integrity", ok,
          format("2j=1..25: orthonormality %.3g, commutation %.3g, closed forms L<=2 %.3g (limit 1e-12 each)", ortho,
                 comm, closed)};
}

CriterionResult conservation() {
  double rho00 = 0.0, herm = 0.0, purity = 0.0;
  for (const auto& r : coherent_runs()) {
    const Trajectory& tr = r.generator_path;
    const double p0 = multipole_norm(tr.states.front());
    for (const auto& s : tr.states) {
      rho00 = std::max(rho00, std::abs(s(0) - tr.states.front()(0)));
      herm = std::max(herm, hermiticity_deviation(s));
      purity = std::max(purity, std::abs(multipole_norm(s) - p0));
    }
  }
  const bool ok = rho00 <= 1e-10 && herm <= 1e-10 && purity <= 1e-10;
  return {7, "conservation", ok,
          format("%zu trajectories: rho00 drift %.3g, hermiticity %.3g, purity drift %.3g (limit 1e-10 each)",
                 coherent_runs().size(), rho00, herm, purity)};
}

CriterionResult quadrupole_beating() {
  const TensorBasis& basis = *TensorBasis::shared(SpinSystem::from_twice(2));
  const double omega_q = 0.7;
  const MultipoleGenerator gen = build_generator(omega_from_efg(EfgSpec::axial(omega_q), basis.spin()), basis);
  StateMultipoles init(basis.spin());
  init(0, 0) = 1.0 / std::sqrt(3.0);
  init(1, 1) = Complex(0.2, 0.1);
  init(1, -1) = -std::conj(init(1, 1));
  const double omega = 3.0 * omega_q;
  const auto times = grid(20.0 * std::numbers::pi / omega, 401);
  const Trajectory tr = evolve(gen, init, times);
  const auto r11 = tr.component(1, 1);
  const auto r21 = tr.component(2, 1);
  const FrequencyFit f11 = fit_frequency(tr.times, r11);
  const FrequencyFit f21 = fit_frequency(tr.times, r21);
  const double err = std::max(std::abs(f11.omega - omega), std::abs(f21.omega - omega)) / omega;
  double drift = 0.0;
  const double w0 = std::norm(r11.front()) + std::norm(r21.front());
  for (std::size_t i = 0; i < r11.size(); ++i) drift = std::max(drift, std::abs(std::norm(r11[i]) + std::norm(r21[i]) - w0));
  return {8, "quadrupole beating", err <= 1e-6 && drift <= 1e-10,
          format("j=1 axial, omega_Q=%g: fitted %.12g vs 3 omega_Q = %.12g, rel. error %.3g (1e-6); "
                 "|rho11|^2+|rho21|^2 drift %.3g (1e-10)",
                 omega_q, f11.omega, omega, err, drift)};
}

CriterionResult monte_carlo_rates(unsigned threads) {
  const TensorBasis& basis = *TensorBasis::shared(SpinSystem::from_twice(2));
  const double omega_f = 0.5, tau_c = 0.1;
  const FluctuationModel model(InteractionTensor(basis.spin()), omega_f, tau_c);
  const RateReport rates = rate_report(model, basis);

  // Casimir identity sum_q [J_q, [J_q, T_LM]] = L(L+1) T_LM and the rates it implies.
  double casimir = 0.0, white = 0.0;
  const auto& jm = basis.spin_matrices();
  const double truncation = -std::expm1(-40.0);
  for (int k = 0; k < basis.size(); ++k) {
    const auto [L, M] = multipole_lm(k);
    ComplexMatrix acc = ComplexMatrix::Zero(basis.dim(), basis.dim());
    for (int q = 0; q < 3; ++q) acc += commutator(jm.cartesian(q), commutator(jm.cartesian(q), basis.op(k)));
    casimir = std::max(casimir, (acc - double(L * (L + 1)) * basis.op(k)).cwiseAbs().maxCoeff());
    const double expected = omega_f * omega_f * tau_c * L * (L + 1) * truncation;
    white = std::max(white, std::abs(rates.rate(L, M) - expected) / (omega_f * omega_f * tau_c));
  }

  // Balanced initial multipoles: every component carries the same weight.
  ComplexVector rho0 = ComplexVector::Zero(basis.size());
  rho0(0) = 1.0 / std::sqrt(3.0);
  for (int L = 1; L <= 2; ++L)
    for (int M = 0; M <= L; ++M) {
      const Complex c = M == 0 ? Complex(0.1, 0.0) : std::polar(0.1, 0.7 * (L + M));
      rho0(multipole_index(L, M)) = c;
      rho0(multipole_index(L, -M)) = (M % 2 ? -1.0 : 1.0) * std::conj(c);
    }
  const ComplexMatrix rho_matrix = reconstruct(StateMultipoles(basis.spin(), rho0), basis);

  const double t_max = 1.0 / rates.rate(1, 0);
  const auto times = grid(t_max, 201);
  StochasticOptions opts;
  opts.n_traj = 2000;
  opts.seed = 9001;
  opts.substeps = 25;
  opts.threads = threads;
  const Trajectory tr = stochastic_evolve(model, rho_matrix, times, opts, basis);

  double worst = 0.0;
  std::array<double, 3> rank_sum{};
  for (int k = 1; k < basis.size(); ++k) {
    const auto [L, M] = multipole_lm(k);
    const Complex c0 = rho0(k);
    std::vector<double> y;
    for (const auto& s : tr.states) y.push_back((s(k) * std::conj(c0)).real() / std::norm(c0));
    const double predicted = rates.rate(L, M);
    const DecayFit fit = fit_decay_rate(tr.times, y, 0.0, std::min(t_max, 1.0 / predicted));
    worst = std::max(worst, std::abs(fit.rate - predicted) / predicted);
    rank_sum[static_cast<std::size_t>(L)] += fit.rate / (2 * L + 1);
  }
  const double ratio = rank_sum[2] / rank_sum[1];
  const bool ok = worst <= 0.10 && std::abs(ratio - 3.0) <= 0.3 && casimir <= 1e-10 && white <= 1e-10;
  return {9, "relaxation rates vs Monte Carlo", ok,
          format("j=1, omega_f tau_c=%g, n_traj=%zu: worst per-component rate difference %.3g (0.10), fitted "
                 "rank-2/rank-1 ratio %.4g (3 +- 0.3), Casimir operator %.3g and rates %.3g (1e-10)",
                 omega_f * tau_c, opts.n_traj, worst, ratio, casimir, white)};
}

CriterionResult exact_algebra() {
  // Clebsch-Gordan table for all arguments <= 3, keyed by twice the quantum numbers.
  std::map<std::array<int, 6>, ExactCoeff> table;
  const auto h = HalfInt::from_twice;
  const auto cg_exact = [&](int a, int ma, int b, int mb, int c, int mc) -> const ExactCoeff& {
    const std::array<int, 6> key{a, ma, b, mb, c, mc};
    auto it = table.find(key);
    if (it == table.end()) it = table.emplace(key, clebsch_gordan(h(a), h(ma), h(b), h(mb), h(c), h(mc))).first;
    return it->second;
  };
  const auto triangle = [](int a, int b, int c) { return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0; };
  constexpr int kMax = 6;

  int ortho_sums = 0, ortho_fail = 0;
  for (int a = 0; a <= kMax; ++a)
    for (int b = 0; b <= kMax; ++b)
      for (int c = std::abs(a - b); c <= std::min(a + b, kMax); c += 2)
        for (int cp = c; cp <= std::min(a + b, kMax); cp += 2)
          for (int mc = -c; mc <= c; mc += 2) {
            SurdSum s;
            for (int ma = -a; ma <= a; ma += 2) {
              const int mb = mc - ma;
              if (std::abs(mb) > b) continue;
              s += cg_exact(a, ma, b, mb, c, mc) * cg_exact(a, ma, b, mb, cp, mc);
            }
            if (c == cp) s -= ExactCoeff::one();
            ++ortho_sums;
            if (!s.is_zero()) ++ortho_fail;
          }

  // Recoupling: sum of four CGs = (-1)^(j1+j2+j3+J) sqrt((2 j12 + 1)(2 j23 + 1)) {j1 j2 j12; j3 J j23}.
  int recouplings = 0, recoupling_fail = 0;
  for (int j1 = 0; j1 <= kMax; ++j1)
    for (int j2 = 0; j2 <= kMax; ++j2)
      for (int j3 = 0; j3 <= kMax; ++j3)
        for (int j12 = std::abs(j1 - j2); j12 <= std::min(j1 + j2, kMax); j12 += 2)
          for (int jt = std::abs(j12 - j3); jt <= std::min(j12 + j3, kMax); jt += 2)
            for (int j23 = std::abs(j2 - j3); j23 <= std::min(j2 + j3, kMax); j23 += 2) {
              if (!triangle(j1, j23, jt)) continue;
              const int mt = jt;
              SurdSum s;
              for (int m1 = -j1; m1 <= j1; m1 += 2)
                for (int m2 = -j2; m2 <= j2; m2 += 2) {
                  const int m3 = mt - m1 - m2;
                  const int m12 = m1 + m2, m23 = m2 + m3;
                  if (std::abs(m3) > j3 || std::abs(m12) > j12 || std::abs(m23) > j23) continue;
                  s += cg_exact(j1, m1, j2, m2, j12, m12) * cg_exact(j12, m12, j3, m3, jt, mt) *
                       cg_exact(j2, m2, j3, m3, j23, m23) * cg_exact(j1, m1, j23, m23, jt, mt);
                }
              const int phase = ((j1 + j2 + j3 + jt) / 2) % 2 == 0 ? 1 : -1;
              const ExactCoeff rhs = ExactCoeff{phase, mpq_class((j12 + 1) * (j23 + 1))} *
                                     six_j(h(j1), h(j2), h(j12), h(j3), h(jt), h(j23));
              s -= rhs;
              ++recouplings;
              if (!s.is_zero()) ++recoupling_fail;
            }

  // Double boundary against a 256-bit evaluation of sign * sqrt(rational).
  double boundary = 0.0;
  for (const auto& [key, c] : table) {
    if (c.is_zero()) continue;
    mpf_class exact(c.rational, 256);
    exact = sqrt(exact);
    const mpf_class diff = (mpf_class(c.to_double(), 256) - c.sign * exact) / exact;
    boundary = std::max(boundary, std::abs(diff.get_d()));
  }
  const bool ok = ortho_fail == 0 && recoupling_fail == 0 && boundary <= 1e-15;
  return {10, "exact algebra", ok,
          format("arguments <= 3: %d orthogonality sums (%d nonzero residuals), %d 6j recouplings (%d nonzero "
                 "residuals), %zu CG doubles with max rel. error %.3g (1e-15)",
                 ortho_sums, ortho_fail, recouplings, recoupling_fail, table.size(), boundary)};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& out, unsigned threads, const std::vector<int>& only) {
  const std::vector<std::function<CriterionResult()>> criteria{
      oracle_equivalence, dual_generator,     bloch_reduction,
      bloch_relaxation,   selection_rules,    basis_integrity,
      conservation,       quadrupole_beating, [threads] { return monte_carlo_rates(threads); },
      exact_algebra};
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = criteria[i]();
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << ": " << r.detail
        << format(" [%.2f s]", r.seconds) << "\n";
    out.flush();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace gbloch
