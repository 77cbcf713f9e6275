#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "mott/model.hpp"
#include "mott/small_signal.hpp"
#include "mott/steady_state.hpp"

namespace mott {

struct CircuitParams {
  double Rs = 3400.0;   // Ohm
  double Cp = 1e-12;    // F
  double Vdc = 1.2;     // V
  void validate() const;
};

enum class CircuitParam { Rs, Cp, Vdc };
CircuitParam parse_circuit_param(std::string_view s);
std::string to_string(CircuitParam p);
double get(const CircuitParams& cp, CircuitParam which);
void set(CircuitParams& cp, CircuitParam which, double value);

struct TrDetClass {
  int id = 0;
  std::string name;
  bool borderline = false;  // on an axis or the parabola: linearization unreliable
};

struct TrDetTolerance {
  double tr = 0.0;    // |tr| below this counts as tr = 0
  double det = 0.0;   // |det| below this counts as det = 0
  double disc = 0.0;  // |tr^2 - 4 det| below this counts as on the parabola
};

// Table-style tr-det classification. `complete` marks a Jacobian that is a
// multiple of the identity (star rather than degenerate node).
TrDetClass classify_trdet(double tr, double det, double disc, const TrDetTolerance& tol = {},
                          bool complete = false);

struct CircuitOperatingPoint {
  StateFraction x_Q{0.5};
  double v_Q = 0;
  double i_Q = 0;  // memristor current
  double r_Q = 0;
  std::array<std::array<double, 2>, 2> jac{};
  double tr = 0, det = 0, disc = 0;
  std::array<std::complex<double>, 2> eigs{};
  TrDetClass trdet;
  double omega0 = 0, omega1 = 0;
  double gamma1 = 0, gammas = 0;  // R1/R_ch, Rs/R_ch
};

CircuitOperatingPoint jacobian(StateFraction x_Q, double v_Q, const CircuitParams& cp,
                               const ModelCoefficients& c);

struct TransferPoles {
  std::complex<double> p_plus, p_minus;
  double discriminant = 0;
  double d0 = 0, d1 = 0, d2 = 1, k_prime = 0;
  double zero = 0;
};

TransferPoles transfer_poles(const FixedPoint1D& q, const CircuitParams& cp,
                             const ModelCoefficients& c);

// right-hand side of the oscillator: (dx/dt, dv/dt)
std::array<double, 2> circuit_rhs(StateFraction x, double v, const CircuitParams& cp,
                                  const ModelCoefficients& c);

double x_nullcline_voltage(StateFraction x, const ModelCoefficients& c);
double v_nullcline_voltage(StateFraction x, const CircuitParams& cp, const ModelCoefficients& c);

// roots of v0(x) = v1(x), ordered by increasing x
std::vector<CircuitOperatingPoint> circuit_fixed_points(const CircuitParams& cp,
                                                        const ModelCoefficients& c);

struct Tangency {
  double Vdc = 0;
  StateFraction x{0.5};
  double v = 0;
};
// bias voltages at which the v-nullcline touches the x-nullcline (fixed Rs)
std::vector<Tangency> nullcline_tangencies(double Rs, const ModelCoefficients& c);

struct PhaseRegion {
  int sign_dx = 0, sign_dv = 0;
  std::size_t cells = 0;
  double x = 0, v = 0;  // a representative interior sample
};

struct NullclineSet {
  std::vector<std::pair<double, double>> x_nullcline;  // (x, v0)
  std::vector<std::pair<double, double>> v_nullcline;  // (x, v1)
  std::vector<CircuitOperatingPoint> fixed_points;
  std::vector<PhaseRegion> region_signs;
};

NullclineSet nullclines(const CircuitParams& cp, const ModelCoefficients& c,
                        const std::vector<StateFraction>& grid);

// tr = 0 along the tracked fixed point, by bisection over [lo, hi]
double critical_parameter(CircuitParam which, const CircuitParams& fixed, double lo, double hi,
                          const ModelCoefficients& c, double rel_tol = 1e-10);

// closed-form companion for the capacitance: tr = 0 solved for Cp
double cp_star_closed_form(const CircuitOperatingPoint& op, double Rs);

struct PowerLaw {
  double a = 0, b = 0, r2 = 0;
  std::vector<double> rs, cp_star;
};
PowerLaw cp_star_power_law(const std::vector<double>& rs_list, double Vdc,
                           const ModelCoefficients& c);

struct HopfReport {
  double value = 0;
  bool nonhyperbolic = false;
  double beta = 0;  // |Im lambda|, rad/s
  double d = 0;     // d Re(lambda) / d parameter
  double re_lambda = 0;
};
HopfReport hopf_conditions(CircuitParam which, const CircuitParams& at, const ModelCoefficients& c);

struct TrDetSweepPoint {
  double value = 0;
  int branch = 0;
  CircuitOperatingPoint op;
};
std::vector<TrDetSweepPoint> trdet_sweep(CircuitParam which, const std::vector<double>& values,
                                         const CircuitParams& base, const ModelCoefficients& c,
                                         unsigned jobs = 0);

// the fixed point nearest (in ln x) to a hint
CircuitOperatingPoint tracked_fixed_point(const CircuitParams& cp, const ModelCoefficients& c,
                                          double ln_x_hint);

}  // namespace mott
