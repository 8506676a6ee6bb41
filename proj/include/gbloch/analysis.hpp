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

// Signal fitting used by reports and acceptance checks.

#pragma once

#include <complex>
#include <functional>
#include <span>

namespace gbloch {

struct FrequencyFit {
  double omega = 0.0;     ///< angular frequency, rad/s
  double residual = 0.0;  ///< rms misfit of the recurrence, relative to the signal rms
  int samples = 0;
};

/// Single-frequency fit of a uniformly sampled signal x(t) = c + a cos(wt) + b sin(wt).
///
/// Such a signal obeys x[n+1] + x[n-1] = 2cos(w dt) x[n] + const exactly, so
/// w follows from a linear least-squares fit of that recurrence. Real and
/// imaginary parts are fitted jointly. Identifiable for 0 <= w < pi/dt.
FrequencyFit fit_frequency(std::span<const double> times, std::span<const std::complex<double>> signal);

/// Angular frequency from the zero crossings of f on [t0, t1]. Crossings are
/// bracketed on `grid` points and refined by root finding, so the estimate is
/// limited by f's own accuracy only. Returns 0 with fewer than two crossings.
double zero_crossing_frequency(const std::function<double(double)>& f, double t0, double t1, int grid = 2000);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;  ///< log of the fitted amplitude at t = 0
  int samples = 0;
};

/// Least-squares fit of log(y) = intercept - rate * t over samples with
/// t in [t_begin, t_end] and y > 0.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t_begin, double t_end);

}  // namespace gbloch
