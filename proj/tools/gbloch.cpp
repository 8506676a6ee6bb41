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

// gbloch command line: run, validate, selftest.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "gbloch/acceptance.hpp"
#include "gbloch/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multipole precession and relaxation of spin j"};
  app.require_subcommand(1);
  app.fallthrough();

  gbloch::RunOptions options;
  std::string out_dir;
  double tolerance = 0.0;
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--tolerance", tolerance, "oracle deviation tolerance (overrides the config)")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", options.threads, "worker threads for stochastic runs; 0 = all cores");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run a simulation config");
  run->add_option("config", config_path, "config JSON")->required();
  auto* validate = app.add_subcommand("validate", "validate a simulation config");
  validate->add_option("config", config_path, "config JSON")->required();
  std::vector<int> only;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--only", only, "criterion numbers to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gbloch::kExitValidation;
  }
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (app.count("--tolerance")) options.tolerance = tolerance;

  if (*run) return gbloch::run_file(config_path, options, std::cerr);
  if (*validate) return gbloch::validate_file(config_path, std::cout);
  const auto results = gbloch::run_acceptance(std::cout, options.threads, only);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  std::cout << (ok ? "all criteria passed" : "some criteria failed") << "\n";
  return ok ? gbloch::kExitOk : gbloch::kExitConsistency;
}
