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

#include "gbloch/relaxation_rates.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <queue>
#include <cmath>
#include <sstream>

#include "gbloch/errors.hpp"

namespace gbloch {

namespace {

// Precomputed pieces of the double-commutator integrand.
class Integrand {
 public:
  Integrand(const FluctuationModel& model, const TensorBasis& basis) : model_(model), basis_(basis) {
    const ComplexMatrix h_s = hamiltonian_matrix(model.static_tensor, basis);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h_s);
    vectors_ = es.eigenvectors();
    energies_ = es.eigenvalues();
    const auto& jm = basis.spin_matrices();
    for (int q = 0; q < 3; ++q) {
      j_eig_[q] = vectors_.adjoint() * jm.cartesian(q) * vectors_;
      inner_[q].reserve(static_cast<std::size_t>(basis.size()));
      for (int k = 0; k < basis.size(); ++k) inner_[q].push_back(commutator(jm.cartesian(q), basis.op(k)));
    }
  }

  /// J_q(-tau) = exp(-iH_S tau) J_q exp(iH_S tau).
  std::array<ComplexMatrix, 3> rotated(double tau) const {
    const ComplexVector phase = (Complex(0, -tau) * energies_.cast<Complex>()).array().exp();
    std::array<ComplexMatrix, 3> out;
    for (int q = 0; q < 3; ++q)
      out[q] = vectors_ * (phase.asDiagonal() * j_eig_[q] * phase.conjugate().asDiagonal()) * vectors_.adjoint();
    return out;
  }

  /// C(tau) sum_q Tr{T_kp^dagger [J_q(-tau), [J_q, T_k]]}.
  Complex operator()(double tau, int kp, int k) const {
    const auto a = rotated(tau);
    Complex acc = 0.0;
    const ComplexMatrix bra = basis_.op(kp).adjoint();
    for (int q = 0; q < 3; ++q) acc += (bra * commutator(a[q], inner_[q][static_cast<std::size_t>(k)])).trace();
    return model_.correlation(tau) * acc;
  }

 private:
  const FluctuationModel& model_;
  const TensorBasis& basis_;
  ComplexMatrix vectors_;
  Eigen::VectorXd energies_;
  std::array<ComplexMatrix, 3> j_eig_;
  std::array<std::vector<ComplexMatrix>, 3> inner_;
};

struct Quadrature {
  Complex value = 0.0;
  double error = 0.0;
};

// Globally adaptive Gauss-Kronrod 7/15: the panel with the largest error
// estimate is bisected until the total error is below tol * max(|I|, scale).
template <typename F>
Quadrature integrate(F f, double upper, double tol, double scale, const char* what) {
  using boost::math::quadrature::gauss_kronrod;
  struct Panel {
    double a, b;
    Complex value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto panel = [&](double a, double b) {
    Panel p{a, b, 0.0, 0.0};
    p.value = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error);
    return p;
  };
  std::priority_queue<Panel> panels;
  constexpr int kInitial = 8;
  for (int i = 0; i < kInitial; ++i) panels.push(panel(upper * i / kInitial, upper * (i + 1) / kInitial));
  constexpr int kMaxPanels = 4000;
  Quadrature q;
  for (;;) {
    q.value = 0.0;
    q.error = 0.0;
    auto copy = panels;
    while (!copy.empty()) {
      q.value += copy.top().value;
      q.error += copy.top().error;
      copy.pop();
    }
    if (q.error <= tol * std::max(std::abs(q.value), scale)) break;
    if (static_cast<int>(panels.size()) >= kMaxPanels || !std::isfinite(q.error)) {
      std::ostringstream msg;
      msg << "quadrature for " << what << " did not converge: estimate " << q.value << ", error " << q.error
          << ", tolerance " << tol;
      throw NumericError(msg.str());
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    panels.push(panel(worst.a, mid));
    panels.push(panel(mid, worst.b));
  }
  return q;
}

}  // namespace

RegimeDiagnostics regime_diagnostics(const FluctuationModel& model, const TensorBasis& basis) {
  model.validate();
  RegimeDiagnostics d;
  d.omega_f_tau_c = model.omega_f * model.tau_c;
  d.hs_norm_tau_c = hermitian_norm(hamiltonian_matrix(model.static_tensor, basis)) * model.tau_c;
  d.motional_narrowing = d.omega_f_tau_c <= 0.1;
  if (!d.motional_narrowing) {
    std::ostringstream msg;
    msg << "omega_f tau_c = " << d.omega_f_tau_c
        << " > 0.1: outside motional narrowing, exponential per-component decay is not reliable";
    d.warnings.push_back(msg.str());
  }
  return d;
}

RateResult relaxation_rate(const FluctuationModel& model, const TensorBasis& basis, int L, int M, double quad_tol) {
  require_rank(basis.spin(), L, M);
  if (!(model.static_tensor.spin() == basis.spin())) throw InvalidArgument("model and basis belong to different j");
  RateResult r;
  r.regime = regime_diagnostics(model, basis);
  if (model.omega_f == 0.0) return r;

  const Integrand f(model, basis);
  const int k = multipole_index(L, M);
  const double upper = 40.0 * model.tau_c;
  // Natural scale of the rates: omega_f^2 tau_c (2j)(2j+1).
  const double scale = model.omega_f * model.omega_f * model.tau_c * basis.spin().max_rank() *
                       (basis.spin().max_rank() + 1);
  const auto q = integrate([&](double t) { return f(t, k, k); }, upper, quad_tol, scale, "rate");
  r.rate = q.value.real();
  r.imaginary = q.value.imag();
  r.error_estimate = q.error;
  return r;
}

double RateReport::max_cross_term() const {
  double worst = 0.0;
  for (int i = 0; i < coupling.rows(); ++i)
    for (int k = 0; k < coupling.cols(); ++k)
      if (i != k) worst = std::max(worst, std::abs(coupling(i, k)));
  return worst;
}

RateReport rate_report(const FluctuationModel& model, const TensorBasis& basis, double quad_tol) {
  if (!(model.static_tensor.spin() == basis.spin())) throw InvalidArgument("model and basis belong to different j");
  const int n = basis.size();
  RateReport report{basis.spin(), Eigen::VectorXd::Zero(n), ComplexMatrix::Zero(n, n),
                    regime_diagnostics(model, basis), 0.0};
  if (model.omega_f == 0.0) return report;

  const Integrand f(model, basis);
  const double upper = 40.0 * model.tau_c;
  const double scale = model.omega_f * model.omega_f * model.tau_c * basis.spin().max_rank() *
                       (basis.spin().max_rank() + 1);
  for (int k = 0; k < n; ++k) {
    for (int kp = 0; kp < n; ++kp) {
      const auto q = integrate([&](double t) { return f(t, kp, k); }, upper, quad_tol, scale, "coupling");
      report.coupling(kp, k) = q.value;
      report.max_error_estimate = std::max(report.max_error_estimate, q.error);
    }
    report.rates(k) = report.coupling(k, k).real();
  }
  return report;
}

}  // namespace gbloch
