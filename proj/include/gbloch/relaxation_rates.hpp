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

// Second-order relaxation rates of the state multipoles for the fluctuating
// field model:
//
//   1/tau_LM = Re int_0^inf dtau C(tau) sum_q Tr{T_LM^dagger [J_q(-tau), [J_q, T_LM]]}
//
// with C(tau) = omega_f^2 exp(-tau/tau_c) and J_q(-tau) = exp(-iH_S tau) J_q exp(iH_S tau).
// Only the diagonal (LM)->(LM) element feeds the rates; off-diagonal elements
// are reported as cross terms.

#pragma once

#include <string>
#include <vector>

#include "gbloch/liouville.hpp"

namespace gbloch {

struct RegimeDiagnostics {
  double omega_f_tau_c = 0.0;
  double hs_norm_tau_c = 0.0;
  /// omega_f tau_c <= 0.1.
  bool motional_narrowing = false;
  std::vector<std::string> warnings;
};

struct RateResult {
  double rate = 0.0;
  double imaginary = 0.0;       ///< Im part of the integral (a frequency shift, not used)
  double error_estimate = 0.0;  ///< quadrature error estimate of the real part
  RegimeDiagnostics regime;
};

RegimeDiagnostics regime_diagnostics(const FluctuationModel& model, const TensorBasis& basis);

/// 1/tau_LM by adaptive Gauss-Kronrod quadrature on [0, 40 tau_c].
/// Throws NumericError if the relative tolerance is not reached.
RateResult relaxation_rate(const FluctuationModel& model, const TensorBasis& basis, int L, int M,
                           double quad_tol = 1e-10);

struct RateReport {
  SpinSystem spin;
  Eigen::VectorXd rates;   ///< flattened (L, M)
  /// Full second-order matrix R(k', k); the diagonal real parts are the rates.
  ComplexMatrix coupling;
  RegimeDiagnostics regime;
  double max_error_estimate = 0.0;

  double rate(int L, int M) const { return rates(multipole_index(L, M)); }
  /// Element coupling (L,M) into (Lp,Mp).
  Complex cross_term(int Lp, int Mp, int L, int M) const {
    return coupling(multipole_index(Lp, Mp), multipole_index(L, M));
  }
  double max_cross_term() const;
};

RateReport rate_report(const FluctuationModel& model, const TensorBasis& basis, double quad_tol = 1e-10);

}  // namespace gbloch
