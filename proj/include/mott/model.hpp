#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mott {

// error kinds shared by every module
struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// VO2 defaults, channel 36 nm x 50 nm
struct DeviceParams {
  double c_p = 3.3e6;      // J m^-3 K^-1
  double dh_tr = 2.35e8;   // J m^-3
  double kappa = 3.5;      // W m^-1 K^-1
  double rho_met = 3e-6;   // Ohm m
  double rho_ins = 1e-2;   // Ohm m
  double dT = 43.0;        // K
  double r_ch = 36e-9;     // m
  double L_ch = 50e-9;     // m
  double T0 = 297.0;       // K, display only
  double Tc = 340.0;       // K, display only

  void validate() const;
};

DeviceParams default_device();
// "default", "10x10", "36x50", "56x100" (radius x length, nm)
DeviceParams device_preset(std::string_view name);

struct ModelCoefficients {
  double A;  // S
  double B;
  double C;  // W
  double D;  // J
  double E;
};

ModelCoefficients derive_coefficients(const DeviceParams& p);

// Metallic fraction.  Keeps ln x alongside x so that states far below
// the double range (x ~ 1e-145 and smaller) stay usable.
class StateFraction {
 public:
  explicit StateFraction(double x);
  static StateFraction from_log(double ln_x);

  double x() const { return x_; }
  double log() const { return ln_x_; }
  double one_minus() const { return eps_; }  // 1 - x, without cancellation

 private:
  StateFraction() = default;
  double x_ = 0.5;
  double ln_x_ = 0.0;
  double eps_ = 0.5;
};

// below this distance from 1 the rational part of H'(x) uses its series
inline constexpr double series_switch = 1e-6;

double memristance(StateFraction s, const ModelCoefficients& c);
double thermal_power(StateFraction s, const ModelCoefficients& c);
double enthalpy_derivative(StateFraction s, const ModelCoefficients& c);

// 1 - x^2 + 2 x^2 ln x + 2E (x ln x)^2, i.e. H'(x) * 2 x ln^2 x / D
double heat_bracket(StateFraction s, const ModelCoefficients& c);

double kinetic_current(StateFraction s, double i, const ModelCoefficients& c);
double kinetic_voltage(StateFraction s, double v, const ModelCoefficients& c);
// d(ln x)/dt under voltage drive; finite even when x underflows
double log_rate_voltage(StateFraction s, double v, const ModelCoefficients& c);

double temperature_profile(double r, StateFraction s, const DeviceParams& p);

namespace detail {
// (1 - x^2 + 2x^2 ln x) / (2 x ln^2 x), direct and series forms
double enthalpy_rational_direct(StateFraction s);
double enthalpy_rational_series(StateFraction s);
}  // namespace detail

}  // namespace mott
