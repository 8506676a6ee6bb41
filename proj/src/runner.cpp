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

#include "gbloch/runner.hpp"

#include <gmp.h>

#include <Eigen/Core>
#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gbloch/analysis.hpp"
#include "gbloch/liouville.hpp"
#include "gbloch/relaxation_rates.hpp"

namespace gbloch {

using nlohmann::json;

namespace {

constexpr double kConservationTol = 1e-10;
constexpr const char* kUnitsLine = "# units: t in s; frequencies in rad/s; angles in rad; rho_LM dimensionless\n";

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json versions() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  return {{"gbloch", "0.1.0"},
          {"eigen", eigen.str()},
          {"boost", BOOST_LIB_VERSION},
          {"gmp", gmp_version},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

struct Checks {
  json list = json::array();
  bool ok = true;

  void add(const std::string& name, double value, double limit) {
    const bool passed = std::isfinite(value) && value <= limit;
    ok = ok && passed;
    list.push_back({{"name", name}, {"value", value}, {"limit", limit}, {"passed", passed}});
  }
};

// Residuals of the conservation laws, from a trajectory read back from CSV.
json conservation(const Trajectory& tr, bool coherent, Checks& checks) {
  double rho00 = 0.0, herm = 0.0, purity = 0.0;
  const Complex r0 = tr.states.front()(0);
  const double p0 = multipole_norm(tr.states.front());
  for (const auto& s : tr.states) {
    rho00 = std::max(rho00, std::abs(s(0) - r0));
    herm = std::max(herm, hermiticity_deviation(s));
    purity = std::max(purity, std::abs(multipole_norm(s) - p0));
  }
  checks.add("rho00_drift", rho00, kConservationTol);
  checks.add("hermiticity", herm, kConservationTol);
  json out{{"rho00_drift", rho00}, {"hermiticity", herm}, {"purity_drift", purity}};
  if (coherent) checks.add("purity_drift", purity, kConservationTol);
  return out;
}

// Single-frequency fits of every component that moves.
json frequency_fits(const Trajectory& tr) {
  json fits = json::array();
  if (tr.size() < 5) return fits;
  const int n = tr.spin.num_multipoles();
  for (int k = 1; k < n; ++k) {
    const auto [L, M] = multipole_lm(k);
    const auto signal = tr.component(L, M);
    double spread = 0.0;
    for (const auto& s : signal) spread = std::max(spread, std::abs(s - signal.front()));
    if (spread < 1e-12) continue;
    const FrequencyFit f = fit_frequency(tr.times, signal);
    fits.push_back({{"L", L}, {"M", M}, {"omega", f.omega}, {"residual", f.residual}, {"single_frequency", f.residual < 1e-6}});
  }
  return fits;
}

void write_text(const std::filesystem::path& path, const std::string& text, RunOutcome& out) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::filesystem::filesystem_error("cannot open for writing", path, std::make_error_code(std::errc::io_error));
  f << text;
  if (!f) throw std::filesystem::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
  out.files.push_back(path.filename().string());
}

std::string angular_csv(const AngularDistribution& w, double t) {
  std::string s = kUnitsLine;
  s += "# W(theta) at t = " + fmt(t) + "\n";
  s += "theta,W\n";
  for (std::size_t i = 0; i < w.theta.size(); ++i) s += fmt(w.theta[i]) + "," + fmt(w.w[i]) + "\n";
  return s;
}

json rates_json(const RateReport& r, const FluctuationModel& model) {
  json rates = json::array();
  for (int k = 0; k < r.rates.size(); ++k) {
    const auto [L, M] = multipole_lm(k);
    rates.push_back({{"L", L}, {"M", M}, {"rate", r.rates(k)}, {"imaginary", r.coupling(k, k).imag()}});
  }
  json rank_mean = json::object();
  for (int L = 0; L <= r.spin.max_rank(); ++L) {
    double sum = 0.0;
    for (int M = -L; M <= L; ++M) sum += r.rate(L, M);
    rank_mean[std::to_string(L)] = sum / (2 * L + 1);
  }
  json out{{"units", "s^-1"},
           {"2j", r.spin.twice_j()},
           {"omega_f", model.omega_f},
           {"tau_c", model.tau_c},
           {"correlation", "exponential"},
           {"rates", rates},
           {"rank_mean", rank_mean},
           {"max_cross_term", r.max_cross_term()},
           {"max_error_estimate", r.max_error_estimate},
           {"regime",
            {{"omega_f_tau_c", r.regime.omega_f_tau_c},
             {"hs_norm_tau_c", r.regime.hs_norm_tau_c},
             {"motional_narrowing", r.regime.motional_narrowing}}},
           {"warnings", r.regime.warnings}};
  if (r.spin.max_rank() >= 2 && r.rate(1, 0) != 0.0) out["ratio_rank2_rank1"] = r.rate(2, 0) / r.rate(1, 0);
  return out;
}

RelaxationSpec relaxation_from_report(const RateReport& r) {
  RelaxationSpec spec(r.spin);
  for (int L = 1; L <= r.spin.max_rank(); ++L)
    for (int M = 0; M <= L; ++M) spec.set_rate(L, M, std::max(0.0, 0.5 * (r.rate(L, M) + r.rate(L, -M))));
  return spec;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (header) {
      t.columns = cells;
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) throw InvalidArgument("CSV row has " + std::to_string(cells.size()) + " cells");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string component_column(const std::string& prefix, int L, int M, const char* part) {
  return prefix + "_" + std::to_string(L) + "_" + (M > 0 ? "+" : "") + std::to_string(M) + "_" + part;
}

std::string trajectory_csv(const Trajectory& traj, const std::string& prefix) {
  const int n = traj.spin.num_multipoles();
  const bool errors = !traj.stderr_re.empty();
  std::string s = kUnitsLine;
  s += "t";
  for (int k = 0; k < n; ++k) {
    const auto [L, M] = multipole_lm(k);
    s += "," + component_column(prefix, L, M, "re") + "," + component_column(prefix, L, M, "im");
  }
  if (errors)
    for (int k = 0; k < n; ++k) {
      const auto [L, M] = multipole_lm(k);
      s += "," + component_column(prefix, L, M, "re_se") + "," + component_column(prefix, L, M, "im_se");
    }
  s += "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    s += fmt(traj.times[i]);
    for (int k = 0; k < n; ++k) s += "," + fmt(traj.states[i](k).real()) + "," + fmt(traj.states[i](k).imag());
    if (errors)
      for (int k = 0; k < n; ++k) s += "," + fmt(traj.stderr_re[i](k)) + "," + fmt(traj.stderr_im[i](k));
    s += "\n";
  }
  return s;
}

Trajectory trajectory_from_csv(const CsvTable& table, const SpinSystem& spin, const std::string& prefix) {
  Trajectory tr(spin);
  const int tcol = table.column("t");
  if (tcol < 0) throw InvalidArgument("CSV has no t column");
  std::vector<std::pair<int, int>> cols;
  for (int k = 0; k < spin.num_multipoles(); ++k) {
    const auto [L, M] = multipole_lm(k);
    const int re = table.column(component_column(prefix, L, M, "re"));
    const int im = table.column(component_column(prefix, L, M, "im"));
    if (re < 0 || im < 0) throw InvalidArgument("CSV lacks columns for (" + std::to_string(L) + "," + std::to_string(M) + ")");
    cols.emplace_back(re, im);
  }
  for (const auto& row : table.rows) {
    tr.times.push_back(row[static_cast<std::size_t>(tcol)]);
    ComplexVector v(spin.num_multipoles());
    for (int k = 0; k < v.size(); ++k)
      v(k) = Complex(row[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)].first)],
                     row[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)].second)]);
    tr.states.push_back(std::move(v));
  }
  return tr;
}

RunOutcome run(const SimulationConfig& config, const RunOptions& options) {
  RunOutcome out;
  out.directory = options.out_dir ? *options.out_dir : std::filesystem::path(config.output_directory);
  std::filesystem::create_directories(out.directory);
  const double tolerance = options.tolerance ? *options.tolerance : config.tolerance;

  const SpinSystem spin = config.spin();
  const TensorBasis& basis = *TensorBasis::shared(spin);
  const InteractionTensor hs = static_interaction(config);
  const bool csv = config.wants("csv");
  const bool want_json = config.wants("json");

  json report{{"mode", std::string(to_string(config.run_mode))},
              {"versions", versions()},
              {"config", config.source},
              {"resolved",
               {{"2j", config.twice_j},
                {"t_max", config.t_max},
                {"n_points", config.n_points},
                {"tolerance", tolerance},
                {"generator", config.generator == GeneratorMethod::commutator_trace ? "commutator_trace"
                                                                                    : "structure_constants"},
                {"scheme", config.scheme == EvolveScheme::eigen ? "eigen" : "rk4"},
                {"initial_state", config.initial_state.label}}}};
  json warnings = hs.warnings();
  json diagnostics = json::array();
  Checks checks;

  std::optional<RateReport> rates;
  std::optional<FluctuationModel> model;
  if (config.relaxation.source == RelaxationConfig::Source::fluctuation_model) {
    model.emplace(hs, config.relaxation.omega_f, config.relaxation.tau_c);
    rates = rate_report(*model, basis);
    const json rj = rates_json(*rates, *model);
    if (want_json) write_text(out.directory / "rates.json", rj.dump(2) + "\n", out);
    for (const auto& w : rates->regime.warnings) warnings.push_back(w);
    report["rates"] = {{"max_error_estimate", rates->max_error_estimate}, {"max_cross_term", rates->max_cross_term()}};
    if (rj.contains("ratio_rank2_rank1")) report["rates"]["ratio_rank2_rank1"] = rj["ratio_rank2_rank1"];
  }

  std::optional<Trajectory> final_traj;
  const std::vector<double> times = config.run_mode == RunMode::rates ? std::vector<double>{} : config.times();

  switch (config.run_mode) {
    case RunMode::rates: {
      const double scale = model->omega_f * model->omega_f * model->tau_c;
      double asym = 0.0, negative = 0.0;
      for (int L = 0; L <= spin.max_rank(); ++L)
        for (int M = -L; M <= L; ++M) {
          asym = std::max(asym, std::abs(rates->rate(L, M) - rates->rate(L, -M)));
          negative = std::max(negative, -rates->rate(L, M));
        }
      checks.add("rate_m_symmetry", asym, 1e-8 * std::max(scale, 1e-300));
      checks.add("rate_nonnegative", negative, 1e-8 * std::max(scale, 1e-300));
      if (hs.omega().cwiseAbs().maxCoeff() == 0.0 && scale > 0.0) {
        // Casimir scaling: every rate equals omega_f^2 tau_c L(L+1) up to the 40 tau_c cutoff.
        const double cutoff = -std::expm1(-40.0);
        double worst = 0.0;
        for (int L = 0; L <= spin.max_rank(); ++L)
          for (int M = -L; M <= L; ++M)
            worst = std::max(worst, std::abs(rates->rate(L, M) - scale * L * (L + 1) * cutoff) / (scale * std::max(1, L * (L + 1))));
        checks.add("casimir_scaling", worst, 1e-8);
      }
      break;
    }
    case RunMode::evolve:
    case RunMode::compare_oracle: {
      MultipoleGenerator gen = build_generator(hs, basis, config.generator);
      const bool coherent = config.relaxation.source == RelaxationConfig::Source::none;
      if (config.relaxation.source == RelaxationConfig::Source::table)
        gen = apply_relaxation(gen, RelaxationSpec::from_table(spin, config.relaxation.rates));
      else if (rates && rates->regime.motional_narrowing)
        gen = apply_relaxation(gen, relaxation_from_report(*rates));
      else if (rates)
        warnings.push_back("outside the motional-narrowing regime; computed rates were not applied to the evolution");
      report["resolved"]["relaxation_applied"] = gen.relaxation_applied;
      const ComplexMatrix rho0 = initial_density(config, basis);
      const Trajectory traj = evolve(gen, decompose(rho0, basis), times, {config.scheme, 0.01});
      for (const auto& d : traj.diagnostics) diagnostics.push_back(d);
      const std::string text = trajectory_csv(traj);
      if (csv) write_text(out.directory / "trajectory.csv", text, out);
      const Trajectory emitted = trajectory_from_csv(parse_csv(text), spin);
      report["conservation"] = conservation(emitted, coherent, checks);
      if (coherent) report["fits"] = {{"frequencies", frequency_fits(emitted)}};
      report["generator_norm"] = generator_norm(gen);

      if (config.run_mode == RunMode::compare_oracle) {
        const Trajectory oracle = decompose(evolve_liouville(hamiltonian_matrix(hs, basis), rho0, times), basis);
        const std::string tail = trajectory_csv(oracle, "oracle");
        const CsvTable oracle_table = parse_csv(tail);
        std::string body;
        for (std::size_t i = 0; i < oracle.size(); ++i) {
          const double d = (emitted.states[i] - oracle.states[i]).cwiseAbs().maxCoeff();
          body += fmt(oracle.times[i]) + "," + fmt(d);
          for (std::size_t c = 1; c < oracle_table.columns.size(); ++c)
            body += "," + fmt(oracle_table.rows[i][c]);
          body += "\n";
        }
        std::string header = "t,max_abs_deviation";
        for (std::size_t c = 1; c < oracle_table.columns.size(); ++c) header += "," + oracle_table.columns[c];
        const std::string dev_text = std::string(kUnitsLine) + header + "\n" + body;
        if (csv) write_text(out.directory / "oracle_deviation.csv", dev_text, out);
        // Max deviation recomputed from the two emitted tables.
        const Trajectory oracle_back = trajectory_from_csv(parse_csv(dev_text), spin, "oracle");
        const double max_dev = max_deviation(emitted, oracle_back);
        report["oracle"] = {{"max_abs_deviation", max_dev}, {"tolerance", tolerance}};
        checks.add("oracle_max_deviation", max_dev, tolerance);
      }
      final_traj = emitted;
      break;
    }
    case RunMode::stochastic: {
      StochasticOptions so;
      so.n_traj = config.mc.n_traj;
      so.seed = config.mc.seed;
      so.substeps = config.mc.substeps;
      so.threads = options.threads;
      const ComplexMatrix rho0 = initial_density(config, basis);
      const Trajectory traj = stochastic_evolve(*model, rho0, times, so, basis);
      for (const auto& d : traj.diagnostics) diagnostics.push_back(d);
      const std::string text = trajectory_csv(traj);
      if (csv) write_text(out.directory / "trajectory.csv", text, out);
      const Trajectory emitted = trajectory_from_csv(parse_csv(text), spin);
      report["conservation"] = conservation(emitted, false, checks);
      report["mc"] = {{"n_traj", so.n_traj}, {"seed", so.seed}, {"substeps", so.substeps}};
      if (hs.omega().cwiseAbs().maxCoeff() == 0.0) {
        // Without a static field every component decays on its own: fit
        // log Re(rho(t) conj(rho(0))) / |rho(0)|^2 over one predicted decay time.
        json fits = json::array();
        for (int k = 1; k < spin.num_multipoles(); ++k) {
          const auto [L, M] = multipole_lm(k);
          const Complex c0 = emitted.states.front()(k);
          if (std::abs(c0) < 1e-6) continue;
          std::vector<double> y;
          for (const auto& s : emitted.states) y.push_back((s(k) * std::conj(c0)).real() / std::norm(c0));
          const double predicted = rates->rate(L, M);
          const double window = predicted > 0.0 ? std::min(config.t_max, 1.0 / predicted) : config.t_max;
          try {
            const DecayFit d = fit_decay_rate(emitted.times, y, 0.0, window);
            fits.push_back({{"L", L}, {"M", M}, {"fitted_rate", d.rate}, {"predicted_rate", predicted},
                            {"relative_difference", predicted > 0 ? std::abs(d.rate - predicted) / predicted : 0.0},
                            {"samples", d.samples}});
          } catch (const InvalidArgument&) {
          }
        }
        report["fits"] = {{"decay_rates", fits}};
      }
      final_traj = emitted;
      break;
    }
  }

  if (config.angular && final_traj) {
    const AngularDistribution w = angular_distribution(final_traj->at(final_traj->size() - 1), *config.angular);
    if (w.imaginary_warning) warnings.push_back("Im rho_L0 up to " + fmt(w.max_imaginary) + " ignored in W(theta)");
    if (csv) write_text(out.directory / "angular.csv", angular_csv(w, final_traj->times.back()), out);
  }

  out.exit_code = checks.ok ? kExitOk : kExitConsistency;
  report["checks"] = checks.list;
  report["warnings"] = warnings;
  report["diagnostics"] = diagnostics;
  report["status"] = checks.ok ? "ok" : "consistency_failure";
  report["exit_code"] = out.exit_code;
  json files = out.files;
  if (want_json) files.push_back("report.json");
  report["files"] = files;
  out.report = report;
  if (want_json) write_text(out.directory / "report.json", report.dump(2) + "\n", out);
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ConfigError("$", "cannot read config file " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_failure(const std::filesystem::path& dir, const std::string& status, int code, const std::string& message) {
  try {
    std::filesystem::create_directories(dir);
    const json report{{"status", status}, {"exit_code", code}, {"error", message}, {"versions", versions()}};
    std::ofstream(dir / "report.json", std::ios::binary) << report.dump(2) << "\n";
  } catch (...) {
  }
}

}  // namespace

int validate_file(const std::filesystem::path& config_path, std::ostream& log) {
  try {
    const SimulationConfig c = validate_config(read_file(config_path));
    log << "valid: 2j=" << c.twice_j << " mode=" << to_string(c.run_mode) << "\n";
    return kExitOk;
  } catch (const InvalidArgument& e) {
    log << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int run_file(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& log) {
  SimulationConfig config;
  try {
    config = validate_config(read_file(config_path));
  } catch (const InvalidArgument& e) {
    log << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
  const std::filesystem::path dir = options.out_dir ? *options.out_dir : std::filesystem::path(config.output_directory);
  try {
    const auto start = std::chrono::steady_clock::now();
    const RunOutcome out = run(config, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << "mode " << to_string(config.run_mode) << ": " << out.report["status"].get<std::string>() << ", wrote";
    for (const auto& f : out.files) log << " " << f;
    log << " to " << out.directory.string() << " (wall time " << seconds << " s)\n";
    for (const auto& c : out.report["checks"])
      if (!c["passed"].get<bool>())
        log << "check failed: " << c["name"].get<std::string>() << " = " << c["value"].get<double>() << " > "
            << c["limit"].get<double>() << "\n";
    return out.exit_code;
  } catch (const InvalidArgument& e) {
    log << "validation error: " << e.what() << "\n";
    write_failure(dir, "validation_error", kExitValidation, e.what());
    return kExitValidation;
  } catch (const NumericError& e) {
    log << "numeric failure: " << e.what() << "\n";
    write_failure(dir, "numeric_failure", kExitNumeric, e.what());
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "output error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace gbloch
