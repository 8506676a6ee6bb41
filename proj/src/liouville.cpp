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

#include "gbloch/liouville.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "gbloch/errors.hpp"

namespace gbloch {

void require_hermitian(const ComplexMatrix& h, const char* what, double tol) {
  if (h.rows() != h.cols()) throw InvalidArgument(std::string(what) + " must be square");
  const double dev = h.size() ? (h - h.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (dev > tol) {
    std::ostringstream msg;
    msg << what << " is not hermitian (max |H - H^dagger| = " << dev << ")";
    throw InvalidArgument(msg.str());
  }
}

double hermitian_norm(const ComplexMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixTrajectory evolve_liouville(const ComplexMatrix& h, const ComplexMatrix& rho0, std::span<const double> times) {
  require_hermitian(h, "Hamiltonian");
  require_time_grid(times);
  if (rho0.rows() != h.rows() || rho0.cols() != h.cols())
    throw InvalidArgument("density matrix and Hamiltonian dimensions differ");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const ComplexMatrix& v = es.eigenvectors();
  const Eigen::VectorXd& e = es.eigenvalues();
  const ComplexMatrix rho_eig = v.adjoint() * rho0 * v;

  MatrixTrajectory traj;
  traj.method = "liouville";
  for (double t : times) {
    // (e^{-iEt} R e^{iEt})_ab = R_ab e^{-i(E_a - E_b)t}
    const ComplexVector phase = (Complex(0, -1) * t * e.cast<Complex>()).array().exp();
    const ComplexMatrix rotated = phase.asDiagonal() * rho_eig * phase.conjugate().asDiagonal();
    traj.times.push_back(t);
    traj.states.push_back(v * rotated * v.adjoint());
  }
  return traj;
}

ComplexMatrix interaction_picture_transform(const ComplexMatrix& x, const ComplexMatrix& h_s, double t,
                                            PictureDirection direction) {
  require_hermitian(h_s, "system Hamiltonian");
  if (x.rows() != h_s.rows() || x.cols() != h_s.cols()) throw InvalidArgument("operator and Hamiltonian dimensions differ");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h_s);
  const double s = direction == PictureDirection::to_interaction ? 1.0 : -1.0;
  const ComplexVector phase = (Complex(0, s * t) * es.eigenvalues().cast<Complex>()).array().exp();
  const ComplexMatrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  return u * x * u.adjoint();
}

void FluctuationModel::validate() const {
  if (!std::isfinite(omega_f) || omega_f < 0.0) throw InvalidArgument("fluctuation amplitude omega_f must be >= 0");
  if (!std::isfinite(tau_c) || !(tau_c > 0.0)) throw InvalidArgument("correlation time tau_c must be > 0");
}

double FluctuationModel::correlation(double tau) const {
  return omega_f * omega_f * std::exp(-std::abs(tau) / tau_c);
}

namespace {

// Running mean and centred second moments (Welford), merged with Chan's update.
struct Moments {
  double count = 0.0;
  std::vector<ComplexVector> mean;
  std::vector<Eigen::VectorXd> m2_re, m2_im;

  Moments(std::size_t n_times, int n) {
    mean.assign(n_times, ComplexVector::Zero(n));
    m2_re.assign(n_times, Eigen::VectorXd::Zero(n));
    m2_im.assign(n_times, Eigen::VectorXd::Zero(n));
  }
  // Samples of one trajectory arrive in time order; count advances after the last.
  void add(std::size_t i, const ComplexVector& x, bool last) {
    const double n = count + 1.0;
    const ComplexVector delta = x - mean[i];
    mean[i] += delta / n;
    const ComplexVector after = x - mean[i];
    m2_re[i] += delta.real().cwiseProduct(after.real());
    m2_im[i] += delta.imag().cwiseProduct(after.imag());
    if (last) count = n;
  }
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const ComplexVector delta = o.mean[i] - mean[i];
      const double w = count * o.count / n;
      m2_re[i] += o.m2_re[i] + w * delta.real().cwiseAbs2();
      m2_im[i] += o.m2_im[i] + w * delta.imag().cwiseAbs2();
      mean[i] += delta * (o.count / n);
    }
    count = n;
  }
};

// Pairwise reduction in a fixed tree shape, independent of scheduling.
Moments pairwise_reduce(std::vector<Moments>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  Moments left = pairwise_reduce(blocks, lo, mid);
  left.merge(pairwise_reduce(blocks, mid, hi));
  return left;
}

constexpr std::size_t kBlock = 32;

}  // namespace

Trajectory stochastic_evolve(const FluctuationModel& model, const ComplexMatrix& rho0, std::span<const double> times,
                             const StochasticOptions& options, const TensorBasis& basis) {
  model.validate();
  require_time_grid(times);
  if (options.n_traj < 1) throw InvalidArgument("n_traj must be >= 1");
  if (options.substeps < 1) throw InvalidArgument("substeps must be >= 1");
  if (times.size() < 2 || times[0] != 0.0) throw InvalidArgument("stochastic time grid must start at 0 with >= 2 points");
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * dt) throw InvalidArgument("stochastic time grid must be uniform");
  }
  if (rho0.rows() != basis.dim() || rho0.cols() != basis.dim())
    throw InvalidArgument("density matrix dimension does not match basis");

  const ComplexMatrix h_s = hamiltonian_matrix(model.static_tensor, basis);
  const double h = dt / options.substeps;
  const double hs_norm = hermitian_norm(h_s);
  if (h > model.tau_c / 20.0 * (1 + 1e-12) || h * (hs_norm + model.omega_f) > 0.05 * (1 + 1e-12)) {
    std::ostringstream msg;
    msg << "stochastic step h = " << h << " violates h <= tau_c/20 = " << model.tau_c / 20.0
        << " or h(||H_S|| + omega_f) <= 0.05 (h <= " << 0.05 / (hs_norm + model.omega_f) << ")";
    throw InvalidArgument(msg.str());
  }

  const auto& jm = basis.spin_matrices();
  const int n = basis.size();
  const std::size_t n_times = times.size();
  const double decay = std::exp(-h / model.tau_c);
  const double kick = model.omega_f * std::sqrt(1.0 - decay * decay);
  const std::size_t n_blocks = (options.n_traj + kBlock - 1) / kBlock;

  auto run_trajectory = [&](std::size_t index, Moments& acc) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    double q[3];
    for (double& qi : q) qi = model.omega_f * normal(rng);  // stationary start

    ComplexMatrix rho = rho0;
    acc.add(0, decompose(rho, basis).coeffs(), n_times == 1);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
    for (std::size_t i = 1; i < n_times; ++i) {
      for (int s = 0; s < options.substeps; ++s) {
        const ComplexMatrix hmat = h_s + q[0] * jm.jx + q[1] * jm.jy + q[2] * jm.jz;
        es.compute(hmat);
        const ComplexVector phase = (Complex(0, -h) * es.eigenvalues().cast<Complex>()).array().exp();
        const ComplexMatrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
        rho = u * rho * u.adjoint();
        for (double& qi : q) qi = qi * decay + kick * normal(rng);
      }
      acc.add(i, decompose(rho, basis).coeffs(), i + 1 == n_times);
    }
  };

  std::vector<Moments> blocks(n_blocks, Moments(n_times, n));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < n_blocks; b = next++) {
      const std::size_t end = std::min(options.n_traj, (b + 1) * kBlock);
      for (std::size_t k = b * kBlock; k < end; ++k) run_trajectory(k, blocks[b]);
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  const Moments total = pairwise_reduce(blocks, 0, n_blocks);
  const double count = total.count;
  Trajectory traj(basis.spin());
  traj.method = "stochastic";
  traj.seed = options.seed;
  traj.times.assign(times.begin(), times.end());
  for (std::size_t i = 0; i < n_times; ++i) {
    traj.states.push_back(total.mean[i]);
    if (count > 1.0) {
      traj.stderr_re.push_back((total.m2_re[i] / ((count - 1.0) * count)).cwiseMax(0.0).cwiseSqrt());
      traj.stderr_im.push_back((total.m2_im[i] / ((count - 1.0) * count)).cwiseMax(0.0).cwiseSqrt());
    } else {
      traj.stderr_re.push_back(Eigen::VectorXd::Zero(n));
      traj.stderr_im.push_back(Eigen::VectorXd::Zero(n));
    }
  }
  std::ostringstream info;
  info << "n_traj=" << options.n_traj << " step=" << h << " substeps=" << options.substeps;
  traj.diagnostics.push_back(info.str());
  return traj;
}

}  // namespace gbloch
