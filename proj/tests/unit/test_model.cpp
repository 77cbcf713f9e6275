#include <doctest.h>

#include <cmath>
#include <string>

#include "mott/model.hpp"
#include "mott/numerics.hpp"

using namespace mott;

namespace {

// |value - printed| within half a unit of the last printed digit
bool matches_printed(double value, const std::string& printed) {
  const double p = std::stod(printed);
  const auto mant = printed.substr(0, printed.find_first_of("eE"));
  const auto dot = mant.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(mant.size() - dot - 1);
  const auto e = printed.find_first_of("eE");
  const int exp10 = e == std::string::npos ? 0 : std::stoi(printed.substr(e + 1));
  return std::abs(value - p) <= 0.5 * std::pow(10.0, exp10 - decimals) * (1 + 1e-12);
}

ModelCoefficients coeffs(const char* preset) { return derive_coefficients(device_preset(preset)); }

}  // namespace

TEST_CASE("coefficients reproduce the printed table for three sizes") {
  struct Row {
    const char* preset;
    const char *A, *B, *C, *D, *E;
  };
  const Row rows[] = {
      {"10x10", "3.14159e-6", "3332.3", "9.45619e-6", "4.45792e-16", "3.31219"},
      {"36x50", "8.14301e-6", "3332.3", "4.7281e-5", "2.88873e-14", "3.31219"},
      {"56x100", "9.85203e-6", "3332.3", "9.45619e-5", "1.398e-13", "3.31219"},
  };
  for (const auto& r : rows) {
    CAPTURE(r.preset);
    const auto c = coeffs(r.preset);
    CHECK(matches_printed(c.A, r.A));
    CHECK(matches_printed(c.B, r.B));
    CHECK(matches_printed(c.C, r.C));
    CHECK(matches_printed(c.D, r.D));
    CHECK(matches_printed(c.E, r.E));
  }
  CHECK(coeffs("default").A == coeffs("36x50").A);
}

TEST_CASE("equal resistivities give B = 0 and a constant memristance") {
  auto p = default_device();
  p.rho_met = p.rho_ins;
  const auto c = derive_coefficients(p);
  CHECK(c.B == 0.0);
  CHECK(memristance(StateFraction(0.01), c) == doctest::Approx(1 / c.A).epsilon(1e-15));
  CHECK(memristance(StateFraction(0.99), c) == doctest::Approx(1 / c.A).epsilon(1e-15));
}

TEST_CASE("non-positive parameters are rejected") {
  auto p = default_device();
  p.rho_met = 0;
  CHECK_THROWS_AS(derive_coefficients(p), invalid_parameter);
  p = default_device();
  p.kappa = -1;
  CHECK_THROWS_AS(derive_coefficients(p), invalid_parameter);
  p = default_device();
  p.r_ch = std::nan("");
  CHECK_THROWS_AS(derive_coefficients(p), invalid_parameter);
  CHECK_THROWS_AS(device_preset("unknown"), invalid_parameter);
}

TEST_CASE("state fraction domain") {
  CHECK_THROWS_AS(StateFraction(0.0), domain_error);
  CHECK_THROWS_AS(StateFraction(1.0), domain_error);
  CHECK_THROWS_AS(StateFraction(-0.2), domain_error);
  CHECK_THROWS_AS(StateFraction::from_log(0.0), domain_error);
  const auto tiny = StateFraction::from_log(-330.0);  // x ~ 1e-145
  CHECK(tiny.log() == -330.0);
  CHECK(tiny.one_minus() == 1.0);
  const auto s = StateFraction(1 - 1e-12);
  CHECK(s.one_minus() == doctest::Approx(1e-12).epsilon(1e-4));
}

TEST_CASE("memristance") {
  const auto c = coeffs("default");
  CHECK(memristance(StateFraction::from_log(-300.0), c) == doctest::Approx(122.8e3).epsilon(1e-3));
  // high-precision oracle: 1/(A(1+B x^2)) at x = 1 - 1e-12
  CHECK(memristance(StateFraction(1 - 1e-12), c) == doctest::Approx(36.841422).epsilon(1e-7));
  double prev = INFINITY;
  // below x ~ 1e-7 the drop 1 + B x^2 is under one ulp
  for (double x : num::logspace(1e-6, 0.999999, 1000)) {
    const double r = memristance(StateFraction(x), c);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("thermal power") {
  const auto c = coeffs("default");
  CHECK(thermal_power(StateFraction(std::exp(-1.0)), c) == doctest::Approx(c.C).epsilon(1e-14));
  CHECK(thermal_power(StateFraction(0.5), c) == doctest::Approx(6.8212020e-5).epsilon(1e-7));
  CHECK(thermal_power(StateFraction(1 - 1e-12), c) > 1e6 * c.C);
  double prev = 0;
  for (double x : num::logspace(1e-9, 0.999, 200)) {
    const double g = thermal_power(StateFraction(x), c);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("enthalpy derivative") {
  const auto c = coeffs("default");
  // arbitrary-precision oracles
  CHECK(enthalpy_derivative(StateFraction(0.5), c) == doctest::Approx(7.2096256e-14).epsilon(1e-7));
  CHECK(enthalpy_derivative(StateFraction(1 - 1e-13), c) ==
        doctest::Approx(c.D * (1 + c.E)).epsilon(1e-9));
  CHECK(c.D * (1 + c.E) == doctest::Approx(1.24567667e-13).epsilon(1e-7));
  CHECK(enthalpy_derivative(StateFraction::from_log(-200.0), c) > 1e50);
  for (double x : num::logspace(1e-12, 1 - 1e-12, 500)) CHECK(enthalpy_derivative(StateFraction(x), c) > 0);
}

TEST_CASE("series and direct branches agree at the switchover") {
  for (double eps : {series_switch, 2 * series_switch, 0.5 * series_switch}) {
    const auto s = StateFraction(1 - eps);
    CAPTURE(eps);
    CHECK(detail::enthalpy_rational_series(s) ==
          doctest::Approx(detail::enthalpy_rational_direct(s)).epsilon(1e-9));
  }
}

TEST_CASE("kinetic function") {
  const auto c = coeffs("default");
  for (double x : num::logspace(1e-12, 0.5, 2000)) CHECK(kinetic_current(StateFraction(x), 0.0, c) < 0);
  for (double e : num::logspace(1e-12, 0.5, 2000)) CHECK(kinetic_current(StateFraction(1 - e), 0.0, c) < 0);
  const auto s = StateFraction(0.1);
  for (double i : {1e-7, 3e-6, 1e-4, 2e-3}) CHECK(kinetic_current(s, i, c) == kinetic_current(s, -i, c));
  for (double x : {1e-8, 0.01, 0.5, 0.9999}) {
    const auto q = StateFraction(x);
    CHECK(kinetic_voltage(q, 0.0, c) == doctest::Approx(kinetic_current(q, 0.0, c)).epsilon(1e-14));
  }
}

TEST_CASE("dynamic routes under constant voltage") {
  const auto c = coeffs("default");
  for (double x : num::logspace(1e-12, 1 - 1e-9, 4000)) CHECK(kinetic_voltage(StateFraction(x), 0.05, c) < 0);
  int changes = 0;
  double prev = kinetic_voltage(StateFraction(1e-12), 0.1, c);
  for (double u : num::linspace(std::log(1e-12), std::log(1 - 1e-9), 20000)) {
    const double f = kinetic_voltage(StateFraction::from_log(u), 0.1, c);
    if ((f > 0) != (prev > 0)) ++changes;
    prev = f;
  }
  CHECK(changes == 2);
}

TEST_CASE("log-space rate equals f_x / x") {
  const auto c = coeffs("default");
  for (double x : {1e-6, 0.003, 0.2, 0.7}) {
    const auto s = StateFraction(x);
    CHECK(log_rate_voltage(s, 0.4, c) == doctest::Approx(kinetic_voltage(s, 0.4, c) / x).epsilon(1e-12));
  }
}

TEST_CASE("temperature profile") {
  const auto p = default_device();
  const auto s = StateFraction(0.2);
  CHECK(temperature_profile(p.r_ch, s, p) == doctest::Approx(p.T0));
  CHECK(temperature_profile(0.2 * p.r_ch, s, p) == doctest::Approx(p.T0 + p.dT));
  CHECK(temperature_profile(std::sqrt(0.2) * p.r_ch, s, p) == doctest::Approx(p.T0 + p.dT / 2).epsilon(1e-12));
  double prev = INFINITY;
  for (double r : num::linspace(0.2 * p.r_ch, p.r_ch, 200)) {
    const double t = temperature_profile(r, s, p);
    CHECK(t <= prev);
    CHECK(t >= p.T0);
    CHECK(t <= p.Tc);
    prev = t;
  }
  CHECK_THROWS_AS(temperature_profile(1.1 * p.r_ch, s, p), domain_error);
  CHECK_THROWS_AS(temperature_profile(0.1 * p.r_ch, s, p), domain_error);
}
