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

#include "gbloch/trajectory.hpp"

#include <cmath>
#include <sstream>

#include "gbloch/errors.hpp"

namespace gbloch {

void require_time_grid(std::span<const double> times) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  if (!(times[0] >= 0.0)) throw InvalidArgument("time grid must start at t >= 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      std::ostringstream msg;
      msg << "time grid must be strictly increasing; t[" << i << "] = " << times[i] << " follows " << times[i - 1];
      throw InvalidArgument(msg.str());
    }
  }
}

std::vector<Complex> Trajectory::component(int L, int M) const {
  require_rank(spin, L, M);
  std::vector<Complex> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s(multipole_index(L, M)));
  return out;
}

Trajectory decompose(const MatrixTrajectory& traj, const TensorBasis& basis) {
  Trajectory out(basis.spin());
  out.method = traj.method;
  out.times = traj.times;
  for (const auto& rho : traj.states) out.states.push_back(decompose(rho, basis).coeffs());
  return out;
}

double max_deviation(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw InvalidArgument("trajectories have different lengths");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.states[i].size() != b.states[i].size()) throw InvalidArgument("trajectories belong to different j");
    worst = std::max(worst, (a.states[i] - b.states[i]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace gbloch
