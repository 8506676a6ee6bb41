#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gbloch/analysis.hpp"
#include "gbloch/errors.hpp"

using namespace gbloch;

TEST_CASE("recurrence frequency fit") {
  const double w = 2.3, dt = 0.05;
  std::vector<double> t;
  std::vector<std::complex<double>> x;
  for (int i = 0; i < 200; ++i) {
    t.push_back(i * dt);
    x.push_back(0.2 + 0.7 * std::exp(std::complex<double>(0, w * t.back())));
  }
  const FrequencyFit f = fit_frequency(t, x);
  CHECK(f.omega == doctest::Approx(w).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
  t[3] += 1e-3;
  CHECK_THROWS_AS(fit_frequency(t, x), InvalidArgument);
}

TEST_CASE("zero crossing frequency") {
  const double w = 7.1;
  const double f = zero_crossing_frequency([&](double t) { return std::cos(w * t + 0.3); }, 0.0, 10.0);
  CHECK(f == doctest::Approx(w).epsilon(1e-12));
  CHECK(zero_crossing_frequency([](double) { return 1.0; }, 0.0, 1.0) == 0.0);
}

TEST_CASE("log-linear decay fit") {
  std::vector<double> t, y;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 * std::exp(-0.8 * t.back()));
  }
  const DecayFit d = fit_decay_rate(t, y, 0.0, 10.0);
  CHECK(d.rate == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(d.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(fit_decay_rate(t, y, 20.0, 30.0), InvalidArgument);
}
