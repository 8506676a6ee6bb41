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

#include "gbloch/config.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "gbloch/liouville.hpp"

namespace gbloch {

using nlohmann::json;

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::evolve: return "evolve";
    case RunMode::compare_oracle: return "compare_oracle";
    case RunMode::rates: return "rates";
    case RunMode::stochastic: return "stochastic";
  }
  return "?";
}

std::vector<double> SimulationConfig::times() const {
  std::vector<double> t(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (n_points - 1);
  return t;
}

bool SimulationConfig::wants(std::string_view format) const {
  for (const auto& f : formats)
    if (f == format) return true;
  return false;
}

namespace {

constexpr int kMaxTwiceJ = 25;

std::string child(const std::string& path, std::string_view key) { return path + "." + std::string(key); }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ConfigError(child(path, key), "unknown field (allowed: " + list + ")");
    }
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

const json& field(const json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(child(path, key), "required field is missing");
  return *it;
}

bool has(const json& obj, std::string_view key) { return obj.contains(key); }

double parse_real(std::string_view text, const std::string& path) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(path, "cannot parse '" + std::string(text) + "' as a number");
  return v;
}

// "1", "-1", "3/2", "-0.5"
HalfInt parse_projection(std::string_view text, const std::string& path) {
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_real(text.substr(0, slash), path);
    const double den = parse_real(text.substr(slash + 1), path);
    if (den != 2.0 || num != std::floor(num)) throw ConfigError(path, "projection must be an integer or k/2");
    return HalfInt::from_twice(static_cast<int>(num));
  }
  const double m = parse_real(text, path);
  const double twice = 2.0 * m;
  if (std::abs(twice - std::round(twice)) > 1e-12) throw ConfigError(path, "projection must be a multiple of 1/2");
  return HalfInt::from_twice(static_cast<int>(std::lround(twice)));
}

std::string rank_limit(int L, int twice_j) {
  std::ostringstream msg;
  msg << "rank L = " << L << " exceeds the limit L ≤ 2j = " << twice_j;
  return msg.str();
}

void parse_magnetic(const json& j, SimulationConfig& c) {
  const std::string path = "$.magnetic";
  require_object(j, path, {"gamma", "B"});
  MagneticSpec m;
  m.gamma = number(field(j, "gamma", path), child(path, "gamma"));
  const json& b = field(j, "B", path);
  if (!b.is_array() || b.size() != 3) throw ConfigError(child(path, "B"), "expected [Bx, By, Bz]");
  for (int i = 0; i < 3; ++i) m.field(i) = number(b[static_cast<std::size_t>(i)], index(child(path, "B"), static_cast<std::size_t>(i)));
  c.magnetic = m;
}

Eigen::Matrix3d parse_matrix3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected a 3x3 array");
  Eigen::Matrix3d m;
  for (std::size_t r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3) throw ConfigError(index(path, r), "expected a row of 3 numbers");
    for (std::size_t col = 0; col < 3; ++col)
      m(static_cast<int>(r), static_cast<int>(col)) = number(j[r][col], index(index(path, r), col));
  }
  return m;
}

void parse_quadrupole(const json& j, SimulationConfig& c) {
  const std::string path = "$.quadrupole";
  require_object(j, path, {"omega_Q", "eta", "efg", "eQ"});
  if (c.twice_j < 2) {
    std::ostringstream msg;
    msg << "the quadrupole coupling is a rank-2 tensor and needs L ≤ 2j, i.e. 2j ≥ 2; got 2j = " << c.twice_j;
    throw ConfigError(path, msg.str());
  }
  const SpinSystem spin = c.spin();
  EfgSpec spec;
  if (has(j, "eQ")) {
    if (has(j, "omega_Q") || has(j, "eta"))
      throw ConfigError(path, "give either eQ with efg, or omega_Q with efg or eta");
    if (!has(j, "efg")) throw ConfigError(child(path, "efg"), "required with eQ");
    const Eigen::Matrix3d phi = parse_matrix3(j["efg"], child(path, "efg"));
    spec = EfgSpec::from_coupling(number(j["eQ"], child(path, "eQ")), phi, spin);
  } else {
    if (!has(j, "omega_Q")) throw ConfigError(child(path, "omega_Q"), "required field is missing");
    const double wq = number(j["omega_Q"], child(path, "omega_Q"));
    if (has(j, "efg") && has(j, "eta")) throw ConfigError(path, "give either efg or eta, not both");
    if (has(j, "efg")) {
      spec.phi = parse_matrix3(j["efg"], child(path, "efg"));
      spec.omega_q = wq;
    } else {
      const double eta = has(j, "eta") ? number(j["eta"], child(path, "eta")) : 0.0;
      if (eta < 0.0 || eta > 1.0) throw ConfigError(child(path, "eta"), "asymmetry must lie in [0, 1]");
      spec = EfgSpec::axial(wq, eta);
    }
  }
  try {
    omega_from_efg(spec, spin);
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  c.quadrupole = spec;
}

void parse_initial_preset(const std::string& text, const std::string& path, SimulationConfig& c) {
  auto& s = c.initial_state;
  s.label = text;
  if (text == "maximally_mixed") {
    s.kind = InitialStateConfig::Kind::maximally_mixed;
  } else if (text.rfind("pure_m:", 0) == 0) {
    s.kind = InitialStateConfig::Kind::pure_m;
    s.m = parse_projection(std::string_view(text).substr(7), path);
    if (!is_projection_of(s.m, c.spin().j())) {
      std::ostringstream msg;
      msg << "m = " << s.m << " is not a projection of j = " << c.spin().j();
      throw ConfigError(path, msg.str());
    }
  } else if (text.rfind("oriented_z:", 0) == 0) {
    s.kind = InitialStateConfig::Kind::oriented_z;
    s.polarization = parse_real(std::string_view(text).substr(11), path);
    if (std::abs(s.polarization) > 1.0) throw ConfigError(path, "polarization p must satisfy |p| <= 1");
  } else {
    throw ConfigError(path, "unknown preset '" + text + "' (maximally_mixed, pure_m:<m>, oriented_z:<p>)");
  }
}

void parse_initial_state(const json& j, SimulationConfig& c) {
  const std::string path = "$.initial_state";
  if (j.is_string()) return parse_initial_preset(j.get<std::string>(), path, c);
  require_object(j, path, {"preset", "multipoles"});
  if (has(j, "preset") == has(j, "multipoles"))
    throw ConfigError(path, "exactly one initial-state source is required: preset or multipoles");
  if (has(j, "preset")) return parse_initial_preset(string(j["preset"], child(path, "preset")), child(path, "preset"), c);

  auto& s = c.initial_state;
  s.kind = InitialStateConfig::Kind::multipoles;
  s.label = "multipoles";
  const std::string lpath = child(path, "multipoles");
  const json& list = j["multipoles"];
  if (!list.is_array() || list.empty()) throw ConfigError(lpath, "expected a non-empty array of {L, M, re, im}");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string ipath = index(lpath, i);
    require_object(list[i], ipath, {"L", "M", "re", "im"});
    const long long L = integer(field(list[i], "L", ipath), child(ipath, "L"));
    const long long M = integer(field(list[i], "M", ipath), child(ipath, "M"));
    if (L < 0 || L > c.twice_j) throw ConfigError(child(ipath, "L"), rank_limit(static_cast<int>(L), c.twice_j));
    if (std::llabs(M) > L) throw ConfigError(child(ipath, "M"), "|M| must not exceed L");
    const double re = has(list[i], "re") ? number(list[i]["re"], child(ipath, "re")) : 0.0;
    const double im = has(list[i], "im") ? number(list[i]["im"], child(ipath, "im")) : 0.0;
    if (!s.entries.emplace(std::pair{static_cast<int>(L), static_cast<int>(M)}, Complex(re, im)).second)
      throw ConfigError(ipath, "duplicate component");
  }
  const double rho00 = 1.0 / std::sqrt(double(c.twice_j + 1));
  auto it = s.entries.find({0, 0});
  if (it == s.entries.end()) {
    s.entries[{0, 0}] = rho00;
  } else if (std::abs(it->second - rho00) > 1e-12) {
    throw ConfigError(lpath, "rho_00 must equal 1/sqrt(2j+1) for a unit-trace state");
  }
  for (const auto& [lm, v] : s.entries) {
    const auto [L, M] = lm;
    auto partner = s.entries.find({L, -M});
    const Complex expected = (M % 2 == 0 ? 1.0 : -1.0) * std::conj(v);
    const Complex have = partner == s.entries.end() ? Complex(0.0) : partner->second;
    if (std::abs(have - expected) > 1e-12) {
      std::ostringstream msg;
      msg << "not hermitian: rho_{" << L << "," << -M << "} must equal (-1)^M conj(rho_{" << L << "," << M << "})";
      throw ConfigError(lpath, msg.str());
    }
  }
}

void parse_relaxation(const json& j, SimulationConfig& c) {
  const std::string path = "$.relaxation";
  require_object(j, path, {"rates", "from_fluctuation_model"});
  if (has(j, "rates") == has(j, "from_fluctuation_model"))
    throw ConfigError(path, "give exactly one of rates or from_fluctuation_model");
  auto& r = c.relaxation;
  if (has(j, "from_fluctuation_model")) {
    const std::string fpath = child(path, "from_fluctuation_model");
    const json& f = j["from_fluctuation_model"];
    require_object(f, fpath, {"omega_f", "tau_c"});
    r.source = RelaxationConfig::Source::fluctuation_model;
    r.omega_f = number(field(f, "omega_f", fpath), child(fpath, "omega_f"));
    r.tau_c = number(field(f, "tau_c", fpath), child(fpath, "tau_c"));
    if (r.omega_f < 0.0) throw ConfigError(child(fpath, "omega_f"), "must be >= 0");
    if (!(r.tau_c > 0.0)) throw ConfigError(child(fpath, "tau_c"), "must be > 0");
    return;
  }
  r.source = RelaxationConfig::Source::table;
  const std::string lpath = child(path, "rates");
  const json& list = j["rates"];
  if (!list.is_array()) throw ConfigError(lpath, "expected an array of {L, M, rate}");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string ipath = index(lpath, i);
    require_object(list[i], ipath, {"L", "M", "rate"});
    const long long L = integer(field(list[i], "L", ipath), child(ipath, "L"));
    const long long M = integer(field(list[i], "M", ipath), child(ipath, "M"));
    const double rate = number(field(list[i], "rate", ipath), child(ipath, "rate"));
    if (L < 0 || L > c.twice_j) throw ConfigError(child(ipath, "L"), rank_limit(static_cast<int>(L), c.twice_j));
    if (std::llabs(M) > L) throw ConfigError(child(ipath, "M"), "|M| must not exceed L");
    if (rate < 0.0) throw ConfigError(child(ipath, "rate"), "relaxation rates must be >= 0");
    if (L == 0 && rate != 0.0) throw ConfigError(child(ipath, "rate"), "rho_00 carries the trace and cannot relax");
    if (!r.rates.emplace(std::pair{static_cast<int>(L), static_cast<int>(M)}, rate).second)
      throw ConfigError(ipath, "duplicate component");
  }
  try {
    RelaxationSpec::from_table(c.spin(), r.rates);
  } catch (const InvalidArgument& e) {
    throw ConfigError(lpath, e.what());
  }
}

void parse_angular(const json& j, SimulationConfig& c) {
  const std::string path = "$.angular";
  require_object(j, path, {"theta", "n_theta", "r"});
  if (has(j, "theta") && has(j, "n_theta")) throw ConfigError(path, "give theta or n_theta, not both");
  AngularDistributionSpec spec;
  if (has(j, "theta")) {
    const json& t = j["theta"];
    if (!t.is_array() || t.empty()) throw ConfigError(child(path, "theta"), "expected a non-empty array of angles (rad)");
    for (std::size_t i = 0; i < t.size(); ++i) spec.theta.push_back(number(t[i], index(child(path, "theta"), i)));
  } else {
    const long long n = has(j, "n_theta") ? integer(j["n_theta"], child(path, "n_theta")) : 181;
    if (n < 2 || n > 100000) throw ConfigError(child(path, "n_theta"), "must lie in [2, 100000]");
    for (long long i = 0; i < n; ++i) spec.theta.push_back(std::numbers::pi * double(i) / double(n - 1));
  }
  if (has(j, "r")) {
    const json& r = j["r"];
    if (!r.is_object()) throw ConfigError(child(path, "r"), "expected an object {\"L\": r_L}");
    for (const auto& [key, value] : r.items()) {
      const std::string kpath = child(child(path, "r"), key);
      int L = -1;
      auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), L);
      if (ec != std::errc() || ptr != key.data() + key.size() || L < 0) throw ConfigError(kpath, "key must be a rank L >= 0");
      spec.r[L] = number(value, kpath);
    }
  }
  c.angular = spec;
}

void check_stochastic_step(const SimulationConfig& c) {
  const TensorBasis& basis = *TensorBasis::shared(c.spin());
  const double hs = hermitian_norm(hamiltonian_matrix(static_interaction(c), basis));
  const double h = c.t_max / (c.n_points - 1) / c.mc.substeps;
  const double limit = std::min(c.relaxation.tau_c / 20.0, 0.05 / (hs + c.relaxation.omega_f));
  if (h > limit * (1 + 1e-12)) {
    std::ostringstream msg;
    msg << "internal step t_max/(n_points-1)/substeps = " << h << " exceeds min(tau_c/20, 0.05/(||H_S|| + omega_f)) = "
        << limit << "; increase substeps to at least " << static_cast<long long>(std::ceil(h * c.mc.substeps / limit));
    throw ConfigError("$.mc.substeps", msg.str());
  }
}

}  // namespace

SimulationConfig validate_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  const std::string path = "$";
  require_object(root, path,
                 {"name", "description", "2j", "magnetic", "quadrupole", "initial_state", "relaxation", "time_grid",
                  "run_mode", "mc", "angular", "tolerance", "output", "generator", "scheme"});
  SimulationConfig c;
  c.source = root;
  for (auto key : {"name", "description"})
    if (has(root, key)) string(root[key], child(path, key));

  const long long tj = integer(field(root, "2j", path), "$.2j");
  if (tj < 1 || tj > kMaxTwiceJ) throw ConfigError("$.2j", "2j must lie in [1, " + std::to_string(kMaxTwiceJ) + "]");
  c.twice_j = static_cast<int>(tj);

  if (has(root, "run_mode")) {
    const std::string m = string(root["run_mode"], "$.run_mode");
    if (m == "evolve") c.run_mode = RunMode::evolve;
    else if (m == "compare_oracle") c.run_mode = RunMode::compare_oracle;
    else if (m == "rates") c.run_mode = RunMode::rates;
    else if (m == "stochastic") c.run_mode = RunMode::stochastic;
    else throw ConfigError("$.run_mode", "unknown mode '" + m + "' (evolve, compare_oracle, rates, stochastic)");
  }

  if (has(root, "magnetic")) parse_magnetic(root["magnetic"], c);
  if (has(root, "quadrupole")) parse_quadrupole(root["quadrupole"], c);
  if (has(root, "relaxation")) parse_relaxation(root["relaxation"], c);

  const bool needs_dynamics = c.run_mode != RunMode::rates;
  if (has(root, "initial_state")) {
    parse_initial_state(root["initial_state"], c);
  } else if (needs_dynamics) {
    throw ConfigError("$.initial_state", "required field is missing");
  }

  if (has(root, "time_grid")) {
    const json& g = root["time_grid"];
    require_object(g, "$.time_grid", {"t_max", "n_points"});
    c.t_max = number(field(g, "t_max", "$.time_grid"), "$.time_grid.t_max");
    const long long n = integer(field(g, "n_points", "$.time_grid"), "$.time_grid.n_points");
    if (!(c.t_max > 0.0)) throw ConfigError("$.time_grid.t_max", "must be > 0");
    if (n < 2 || n > 10000000) throw ConfigError("$.time_grid.n_points", "must lie in [2, 10^7]");
    c.n_points = static_cast<int>(n);
  } else if (needs_dynamics) {
    throw ConfigError("$.time_grid", "required field is missing");
  }

  if (has(root, "mc")) {
    const json& m = root["mc"];
    require_object(m, "$.mc", {"n_traj", "seed", "substeps"});
    const long long n = integer(field(m, "n_traj", "$.mc"), "$.mc.n_traj");
    if (n < 1) throw ConfigError("$.mc.n_traj", "must be >= 1");
    c.mc.n_traj = static_cast<std::size_t>(n);
    const json& seed = field(m, "seed", "$.mc");
    if (!seed.is_number_unsigned()) throw ConfigError("$.mc.seed", "expected a non-negative integer");
    c.mc.seed = seed.get<std::uint64_t>();
    if (has(m, "substeps")) {
      const long long s = integer(m["substeps"], "$.mc.substeps");
      if (s < 1 || s > 1000000) throw ConfigError("$.mc.substeps", "must lie in [1, 10^6]");
      c.mc.substeps = static_cast<int>(s);
    }
  }

  if (has(root, "angular")) parse_angular(root["angular"], c);
  if (has(root, "tolerance")) {
    c.tolerance = number(root["tolerance"], "$.tolerance");
    if (!(c.tolerance > 0.0)) throw ConfigError("$.tolerance", "must be > 0");
  }
  if (has(root, "output")) {
    const json& o = root["output"];
    require_object(o, "$.output", {"directory", "formats"});
    if (has(o, "directory")) c.output_directory = string(o["directory"], "$.output.directory");
    if (c.output_directory.empty()) throw ConfigError("$.output.directory", "must not be empty");
    if (has(o, "formats")) {
      const json& f = o["formats"];
      if (!f.is_array()) throw ConfigError("$.output.formats", "expected an array");
      c.formats.clear();
      for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string fmt = string(f[i], index("$.output.formats", i));
        if (fmt != "csv" && fmt != "json") throw ConfigError(index("$.output.formats", i), "unknown format (csv, json)");
        c.formats.push_back(fmt);
      }
    }
  }
  if (has(root, "generator")) {
    const std::string g = string(root["generator"], "$.generator");
    if (g == "commutator_trace") c.generator = GeneratorMethod::commutator_trace;
    else if (g == "structure_constants") c.generator = GeneratorMethod::structure_constants;
    else throw ConfigError("$.generator", "unknown generator '" + g + "' (commutator_trace, structure_constants)");
  }
  if (has(root, "scheme")) {
    const std::string s = string(root["scheme"], "$.scheme");
    if (s == "eigen") c.scheme = EvolveScheme::eigen;
    else if (s == "rk4") c.scheme = EvolveScheme::rk4;
    else throw ConfigError("$.scheme", "unknown scheme '" + s + "' (eigen, rk4)");
  }

  // Cross-field rules.
  using Source = RelaxationConfig::Source;
  switch (c.run_mode) {
    case RunMode::compare_oracle:
      if (c.relaxation.source != Source::none)
        throw ConfigError("$.relaxation", "compare_oracle checks coherent evolution; remove relaxation");
      break;
    case RunMode::rates:
      if (c.relaxation.source != Source::fluctuation_model)
        throw ConfigError("$.relaxation", "rates mode needs relaxation.from_fluctuation_model");
      break;
    case RunMode::stochastic:
      if (c.relaxation.source != Source::fluctuation_model)
        throw ConfigError("$.relaxation", "stochastic mode needs relaxation.from_fluctuation_model");
      if (!has(root, "mc")) throw ConfigError("$.mc", "stochastic mode needs mc {n_traj, seed}");
      check_stochastic_step(c);
      break;
    case RunMode::evolve:
      break;
  }
  if (has(root, "mc") && c.run_mode != RunMode::stochastic)
    throw ConfigError("$.mc", "only used in stochastic mode");
  return c;
}

InteractionTensor static_interaction(const SimulationConfig& config) {
  const SpinSystem spin = config.spin();
  InteractionTensor t(spin);
  if (config.magnetic) t += omega_from_magnetic(*config.magnetic, spin);
  if (config.quadrupole) t += omega_from_efg(*config.quadrupole, spin);
  return t;
}

ComplexMatrix initial_density(const SimulationConfig& config, const TensorBasis& basis) {
  const int n = basis.dim();
  const auto& s = config.initial_state;
  using Kind = InitialStateConfig::Kind;
  switch (s.kind) {
    case Kind::maximally_mixed:
      return ComplexMatrix::Identity(n, n) / double(n);
    case Kind::pure_m: {
      ComplexMatrix rho = ComplexMatrix::Zero(n, n);
      const int i = basis.spin().index_of(s.m);
      rho(i, i) = 1.0;
      return rho;
    }
    case Kind::oriented_z:
      return (ComplexMatrix::Identity(n, n) + s.polarization / basis.spin().j().value() * basis.spin_matrices().jz) /
             double(n);
    case Kind::multipoles: {
      StateMultipoles m(basis.spin());
      for (const auto& [lm, v] : s.entries) m(lm.first, lm.second) = v;
      return reconstruct(m, basis);
    }
  }
  return {};
}

}  // namespace gbloch
