#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gbloch/config.hpp"
#include "gbloch/runner.hpp"

using namespace gbloch;

namespace {

const char* kMinimal = R"({"2j": 1, "magnetic": {"gamma": 1, "B": [0, 0, 1]},
  "time_grid": {"t_max": 10, "n_points": 101}, "run_mode": "evolve", "initial_state": "oriented_z:1"})";

std::string rejection(const std::string& text) {
  try {
    validate_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gbloch_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal config is accepted with defaults resolved") {
  const SimulationConfig c = validate_config(kMinimal);
  CHECK(c.twice_j == 1);
  CHECK(c.run_mode == RunMode::evolve);
  CHECK(c.initial_state.kind == InitialStateConfig::Kind::oriented_z);
  CHECK(c.initial_state.polarization == 1.0);
  CHECK(c.tolerance == 1e-8);
  CHECK(c.times().size() == 101);
  CHECK(c.times().back() == 10.0);
  CHECK(c.wants("csv"));
  CHECK(c.wants("json"));
}

TEST_CASE("quadrupole for j=1/2 cites the rank limit") {
  const std::string msg = rejection(R"({"2j": 1, "quadrupole": {"omega_Q": 1}, "initial_state": "maximally_mixed",
    "time_grid": {"t_max": 1, "n_points": 11}})");
  CHECK(msg.find("L ≤ 2j") != std::string::npos);
  CHECK(msg.find("$.quadrupole") == 0);
}

TEST_CASE("negative relaxation rate is rejected") {
  const std::string msg = rejection(R"({"2j": 2, "initial_state": "pure_m:1", "time_grid": {"t_max": 1, "n_points": 11},
    "relaxation": {"rates": [{"L": 1, "M": 0, "rate": -1}]}})");
  CHECK(msg.find("$.relaxation.rates[0].rate") == 0);
}

TEST_CASE("schema violations carry the field path") {
  CHECK(rejection(R"({"2j": 1, "initial_state": "maximally_mixed", "time_grid": {"t_max": 1, "n_points": 11},
    "bogus": 1})").find("$") == 0);
  CHECK(rejection(R"({"2j": 0})").find("$.2j") == 0);
  CHECK(rejection(R"({"2j": 1, "initial_state": "maximally_mixed", "time_grid": {"t_max": -1, "n_points": 11}})")
            .find("$.time_grid.t_max") == 0);
  CHECK(rejection(R"({"2j": 1, "initial_state": "pure_m:3/2", "time_grid": {"t_max": 1, "n_points": 11}})")
            .find("$.initial_state") == 0);
  CHECK(rejection(R"({"2j": 2, "initial_state": {"multipoles": [{"L": 3, "M": 0, "re": 0.1}]},
    "time_grid": {"t_max": 1, "n_points": 11}})").find("L ≤ 2j") != std::string::npos);
  CHECK(rejection("{not json").find("$") == 0);
  CHECK(rejection(R"({"2j": 1, "initial_state": "maximally_mixed", "time_grid": {"t_max": 1, "n_points": 11},
    "run_mode": "compare_oracle", "relaxation": {"rates": [{"L": 1, "M": 0, "rate": 1}]}})").find("$.relaxation") == 0);
  CHECK(rejection(R"({"2j": 1, "initial_state": "maximally_mixed", "time_grid": {"t_max": 1, "n_points": 11},
    "mc": {"n_traj": 10, "seed": 1}})").find("$.mc") == 0);
}

TEST_CASE("stochastic step is checked at validation") {
  const std::string base = R"({"2j": 1, "initial_state": "oriented_z:1", "time_grid": {"t_max": 1, "n_points": 11},
    "run_mode": "stochastic", "relaxation": {"from_fluctuation_model": {"omega_f": 0.5, "tau_c": 0.1}},)";
  CHECK(rejection(base + R"("mc": {"n_traj": 10, "seed": 1, "substeps": 1}})").find("$.mc.substeps") == 0);
  CHECK(rejection(base + R"("mc": {"n_traj": 10, "seed": 1, "substeps": 20}})").empty());
}

TEST_CASE("initial states") {
  const TensorBasis b(SpinSystem::from_twice(2));
  SimulationConfig c = validate_config(R"({"2j": 2, "initial_state": "pure_m:-1", "time_grid": {"t_max": 1, "n_points": 2}})");
  ComplexMatrix rho = initial_density(c, b);
  CHECK(rho(0, 0) == Complex(1.0));
  CHECK(std::abs(rho.trace() - 1.0) < 1e-15);
  c = validate_config(R"({"2j": 2, "initial_state": {"multipoles": [{"L": 2, "M": 0, "re": 0.2}]},
    "time_grid": {"t_max": 1, "n_points": 2}})");
  rho = initial_density(c, b);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
  CHECK(std::abs(decompose(rho, b)(2, 0) - 0.2) < 1e-15);
}

TEST_CASE("CSV round trip is exact") {
  const SpinSystem s = SpinSystem::from_twice(2);
  Trajectory tr(s);
  tr.times = {0.0, 0.1};
  tr.states = {ComplexVector::Random(9), ComplexVector::Random(9)};
  const std::string text = trajectory_csv(tr);
  CHECK(text.find("rho_1_+1_re") != std::string::npos);
  CHECK(text.find("rho_2_-2_im") != std::string::npos);
  const Trajectory back = trajectory_from_csv(parse_csv(text), s);
  CHECK(max_deviation(tr, back) == 0.0);
}

TEST_CASE("compare_oracle reports the deviation and fails a tight tolerance") {
  const SimulationConfig c = validate_config(R"({"2j": 1, "magnetic": {"gamma": 1, "B": [0.6, 0, 0.8]},
    "initial_state": "oriented_z:1", "time_grid": {"t_max": 10, "n_points": 101}, "run_mode": "compare_oracle"})");
  RunOptions opt;
  opt.out_dir = scratch("oracle");
  const RunOutcome ok = run(c, opt);
  CHECK(ok.exit_code == kExitOk);
  CHECK(ok.report["oracle"]["max_abs_deviation"].get<double>() <= 1e-8);
  opt.tolerance = 1e-300;
  CHECK(run(c, opt).exit_code == kExitConsistency);
}

TEST_CASE("quadrupole beat is fitted at 3 omega_Q") {
  const SimulationConfig c = validate_config(R"({"2j": 2, "quadrupole": {"omega_Q": 0.7},
    "initial_state": {"multipoles": [{"L": 1, "M": 1, "re": 0.2, "im": 0.1}, {"L": 1, "M": -1, "re": -0.2, "im": 0.1}]},
    "time_grid": {"t_max": 30, "n_points": 601}})");
  RunOptions opt;
  opt.out_dir = scratch("beat");
  const RunOutcome out = run(c, opt);
  CHECK(out.exit_code == kExitOk);
  int seen = 0;
  for (const auto& f : out.report["fits"]["frequencies"]) {
    if (f["M"].get<int>() != 1) continue;
    ++seen;
    CHECK(std::abs(f["omega"].get<double>() / 2.1 - 1.0) <= 1e-6);
  }
  CHECK(seen == 2);
}

TEST_CASE("isotropic rates have rank-2 to rank-1 ratio 3") {
  const SimulationConfig c = validate_config(R"({"2j": 2, "run_mode": "rates",
    "relaxation": {"from_fluctuation_model": {"omega_f": 0.5, "tau_c": 0.1}}})");
  RunOptions opt;
  opt.out_dir = scratch("rates");
  const RunOutcome out = run(c, opt);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.report["rates"]["ratio_rank2_rank1"].get<double>() == doctest::Approx(3.0).epsilon(1e-10));
  const auto rates = nlohmann::json::parse(slurp(*opt.out_dir / "rates.json"));
  CHECK(rates["rank_mean"]["2"].get<double>() == doctest::Approx(0.15).epsilon(1e-10));
}

TEST_CASE("identical configs give byte-identical outputs") {
  const std::string text = R"({"2j": 2, "initial_state": "oriented_z:0.8", "time_grid": {"t_max": 2, "n_points": 21},
    "run_mode": "stochastic", "relaxation": {"from_fluctuation_model": {"omega_f": 0.5, "tau_c": 0.1}},
    "mc": {"n_traj": 40, "seed": 7, "substeps": 25}, "angular": {"n_theta": 5}})";
  const SimulationConfig c = validate_config(text);
  RunOptions a, b;
  a.out_dir = scratch("det_a");
  b.out_dir = scratch("det_b");
  a.threads = 1;
  b.threads = 3;
  const RunOutcome ra = run(c, a);
  const RunOutcome rb = run(c, b);
  REQUIRE(ra.files == rb.files);
  for (const auto& f : ra.files) CHECK(slurp(*a.out_dir / f) == slurp(*b.out_dir / f));
}

TEST_CASE("run_file maps failures to exit codes") {
  std::ostringstream log;
  const auto dir = scratch("files");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"2j": 1, "quadrupole": {"omega_Q": 1}})";
  CHECK(run_file(dir / "bad.json", {}, log) == kExitValidation);
  CHECK(run_file(dir / "missing.json", {}, log) == kExitValidation);
  CHECK(validate_file(dir / "bad.json", log) == kExitValidation);
  std::ofstream(dir / "good.json") << kMinimal;
  RunOptions opt;
  opt.out_dir = dir / "out";
  CHECK(run_file(dir / "good.json", opt, log) == kExitOk);
  CHECK(std::filesystem::exists(dir / "out" / "trajectory.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "report.json"));
}
