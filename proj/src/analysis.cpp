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

#include "gbloch/analysis.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "gbloch/errors.hpp"

namespace gbloch {

FrequencyFit fit_frequency(std::span<const double> times, std::span<const std::complex<double>> signal) {
  if (times.size() != signal.size()) throw InvalidArgument("times and signal lengths differ");
  if (times.size() < 5) throw InvalidArgument("frequency fit needs at least 5 samples");
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::abs(dt)) throw InvalidArgument("frequency fit needs a uniform grid");

  // Rows: x[n] * a + {1 or 0} * b_re + {0 or 1} * b_im = x[n+1] + x[n-1], one row per real component.
  const std::size_t inner = times.size() - 2;
  Eigen::MatrixXd design(2 * inner, 3);
  Eigen::VectorXd rhs(2 * inner);
  for (std::size_t n = 0; n < inner; ++n) {
    const auto prev = signal[n], cur = signal[n + 1], next = signal[n + 2];
    design.row(2 * n) << cur.real(), 1.0, 0.0;
    design.row(2 * n + 1) << cur.imag(), 0.0, 1.0;
    rhs(2 * n) = next.real() + prev.real();
    rhs(2 * n + 1) = next.imag() + prev.imag();
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  const double c = std::clamp(0.5 * coef(0), -1.0, 1.0);

  FrequencyFit fit;
  fit.omega = std::acos(c) / dt;
  fit.samples = static_cast<int>(times.size());
  double scale = 0.0;
  for (const auto& s : signal) scale += std::norm(s);
  scale = std::sqrt(scale / static_cast<double>(signal.size()));
  const double misfit = (design * coef - rhs).norm() / std::sqrt(static_cast<double>(rhs.size()));
  fit.residual = scale > 0.0 ? misfit / scale : misfit;
  return fit;
}

double zero_crossing_frequency(const std::function<double(double)>& f, double t0, double t1, int grid) {
  if (!(t1 > t0) || grid < 2) throw InvalidArgument("zero crossing search needs t1 > t0 and grid >= 2");
  std::vector<double> roots;
  double a = t0;
  double fa = f(a);
  for (int i = 1; i <= grid; ++i) {
    const double b = t0 + (t1 - t0) * i / grid;
    const double fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
      roots.push_back(0.5 * (bracket.first + bracket.second));
    }
    a = b;
    fa = fb;
  }
  if (roots.size() < 2) return 0.0;
  return std::numbers::pi * static_cast<double>(roots.size() - 1) / (roots.back() - roots.front());
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t_begin, double t_end) {
  if (times.size() != values.size()) throw InvalidArgument("times and values lengths differ");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_begin || times[i] > t_end || !(values[i] > 0.0)) continue;
    const double x = times[i];
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw InvalidArgument("decay fit needs at least two positive samples in the window");
  const double denom = n * sxx - sx * sx;
  DecayFit fit;
  fit.samples = n;
  const double slope = (n * sxy - sx * sy) / denom;
  fit.rate = -slope;
  fit.intercept = (sy - slope * sx) / n;
  return fit;
}

}  // namespace gbloch
