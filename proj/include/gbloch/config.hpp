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

// Declarative simulation config (one JSON document) and its validation.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gbloch/errors.hpp"
#include "gbloch/interactions.hpp"
#include "gbloch/multipoles.hpp"
#include "gbloch/precession.hpp"

namespace gbloch {

/// Schema or physics violation in a config; `path` locates the field ("$.quadrupole.eta").
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string path, const std::string& message)
      : InvalidArgument(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class RunMode { evolve, compare_oracle, rates, stochastic };
std::string_view to_string(RunMode mode);

struct InitialStateConfig {
  enum class Kind { maximally_mixed, pure_m, oriented_z, multipoles };
  Kind kind = Kind::maximally_mixed;
  HalfInt m;                 ///< pure_m
  double polarization = 0.0;  ///< oriented_z: rho = (1 + p J_z / j) / (2j+1)
  std::map<std::pair<int, int>, Complex> entries;  ///< explicit rho_LM
  std::string label;
};

struct RelaxationConfig {
  enum class Source { none, table, fluctuation_model };
  Source source = Source::none;
  std::map<std::pair<int, int>, double> rates;
  double omega_f = 0.0;
  double tau_c = 0.0;
};

struct MonteCarloConfig {
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  int substeps = 1;
};

struct SimulationConfig {
  int twice_j = 1;
  std::optional<MagneticSpec> magnetic;
  std::optional<EfgSpec> quadrupole;
  InitialStateConfig initial_state;
  RelaxationConfig relaxation;
  double t_max = 0.0;
  int n_points = 0;
  RunMode run_mode = RunMode::evolve;
  MonteCarloConfig mc;
  GeneratorMethod generator = GeneratorMethod::commutator_trace;
  EvolveScheme scheme = EvolveScheme::eigen;
  std::optional<AngularDistributionSpec> angular;
  double tolerance = 1e-8;
  std::string output_directory = "gbloch_out";
  std::vector<std::string> formats{"csv", "json"};
  /// Config as given, echoed into the report.
  nlohmann::json source;

  SpinSystem spin() const { return SpinSystem::from_twice(twice_j); }
  std::vector<double> times() const;
  bool wants(std::string_view format) const;
};

/// Parses and validates a JSON config, resolving all defaults.
/// Throws ConfigError with the offending field path.
SimulationConfig validate_config(std::string_view text);

/// Static interaction of the config (magnetic + quadrupole).
InteractionTensor static_interaction(const SimulationConfig& config);

/// Density matrix of the configured initial state.
ComplexMatrix initial_density(const SimulationConfig& config, const TensorBasis& basis);

}  // namespace gbloch
