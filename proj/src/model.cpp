#include "mott/model.hpp"

#include <cmath>
#include <numbers>

namespace mott {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw invalid_parameter(std::string(name) + " must be positive and finite");
}

}  // namespace

void DeviceParams::validate() const {
  require_positive(c_p, "c_p");
  require_positive(dh_tr, "dh_tr");
  require_positive(kappa, "kappa");
  require_positive(rho_met, "rho_met");
  require_positive(rho_ins, "rho_ins");
  require_positive(dT, "dT");
  require_positive(r_ch, "r_ch");
  require_positive(L_ch, "L_ch");
  require_positive(T0, "T0");
  require_positive(Tc, "Tc");
  // equality is tolerated: it is the B = 0 limit
  if (rho_ins < rho_met)
    throw invalid_parameter("rho_ins must not be below rho_met");
  auto in_band = [](double v) { return v > 1e-10 && v < 1e-5; };
  if (!in_band(r_ch) || !in_band(L_ch))
    throw invalid_parameter("channel geometry outside (1e-10, 1e-5) m");
}

DeviceParams default_device() { return DeviceParams{}; }

DeviceParams device_preset(std::string_view name) {
  DeviceParams p;
  if (name == "default" || name == "36x50") return p;
  if (name == "10x10") {
    p.r_ch = 10e-9;
    p.L_ch = 10e-9;
    return p;
  }
  if (name == "56x100") {
    p.r_ch = 56e-9;
    p.L_ch = 100e-9;
    return p;
  }
  throw invalid_parameter("unknown device preset '" + std::string(name) + "'");
}

ModelCoefficients derive_coefficients(const DeviceParams& p) {
  p.validate();
  const double pi = std::numbers::pi;
  ModelCoefficients c;
  c.A = pi * p.r_ch * p.r_ch / (p.rho_ins * p.L_ch);
  c.B = p.rho_ins / p.rho_met - 1.0;
  c.C = 2.0 * pi * p.L_ch * p.kappa * p.dT;
  c.D = pi * p.L_ch * p.r_ch * p.r_ch * p.c_p * p.dT;
  c.E = 2.0 * p.dh_tr / (p.c_p * p.dT);
  return c;
}

StateFraction::StateFraction(double x) {
  if (!(x > 0.0 && x < 1.0))
    throw domain_error("state fraction must lie in (0, 1)");
  x_ = x;
  ln_x_ = std::log(x);
  eps_ = 1.0 - x;
}

StateFraction StateFraction::from_log(double ln_x) {
  if (!(ln_x < 0.0) || std::isnan(ln_x))
    throw domain_error("ln x must be negative");
  StateFraction s;
  s.ln_x_ = ln_x;
  s.x_ = std::exp(ln_x);  // may underflow to 0, ln x stays exact
  s.eps_ = -std::expm1(ln_x);
  return s;
}

double memristance(StateFraction s, const ModelCoefficients& c) {
  const double x = s.x();
  return 1.0 / (c.A * (1.0 + c.B * x * x));
}

double thermal_power(StateFraction s, const ModelCoefficients& c) {
  return -c.C / s.log();
}

namespace detail {

double enthalpy_rational_direct(StateFraction s) {
  const double x = s.x(), l = s.log(), e = s.one_minus();
  return (e * (2.0 - e) + 2.0 * x * x * l) / (2.0 * x * l * l);
}

double enthalpy_rational_series(StateFraction s) {
  // 1 - e/3 + O(e^3); the e^2 coefficient vanishes
  return 1.0 - s.one_minus() / 3.0;
}

}  // namespace detail

double enthalpy_derivative(StateFraction s, const ModelCoefficients& c) {
  const double rat = s.one_minus() < series_switch ? detail::enthalpy_rational_series(s)
                                                    : detail::enthalpy_rational_direct(s);
  return c.D * (rat + c.E * s.x());
}

double heat_bracket(StateFraction s, const ModelCoefficients& c) {
  const double x = s.x(), l = s.log(), e = s.one_minus();
  if (e < series_switch) {
    return 2.0 * x * l * l * (detail::enthalpy_rational_series(s) + c.E * x);
  }
  const double xl = x * l;
  return e * (2.0 - e) + 2.0 * x * xl + 2.0 * c.E * xl * xl;
}

double kinetic_current(StateFraction s, double i, const ModelCoefficients& c) {
  const double x = s.x(), l = s.log();
  const double r = memristance(s, c);
  const double num = 2.0 * x * l * l * r * i * i + 2.0 * c.C * x * l;
  return num / (c.D * heat_bracket(s, c));
}

double kinetic_voltage(StateFraction s, double v, const ModelCoefficients& c) {
  const double x = s.x(), l = s.log();
  const double g = 1.0 / memristance(s, c);
  const double num = 2.0 * x * l * l * g * v * v + 2.0 * c.C * x * l;
  return num / (c.D * heat_bracket(s, c));
}

double log_rate_voltage(StateFraction s, double v, const ModelCoefficients& c) {
  const double x = s.x(), l = s.log();
  const double g = c.A * (1.0 + c.B * x * x);
  return (2.0 * l * l * g * v * v + 2.0 * c.C * l) / (c.D * heat_bracket(s, c));
}

double temperature_profile(double r, StateFraction s, const DeviceParams& p) {
  const double inner = s.x() * p.r_ch;
  const double slack = 1e-12 * p.r_ch;
  if (!(r >= inner - slack && r <= p.r_ch + slack))
    throw domain_error("radius outside the insulating shell");
  double t = p.T0 + p.dT * std::log(r / p.r_ch) / s.log();
  if (t < p.T0) t = p.T0;
  if (t > p.T0 + p.dT) t = p.T0 + p.dT;
  return t;
}

}  // namespace mott
