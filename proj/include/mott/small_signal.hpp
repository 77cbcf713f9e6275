#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mott/model.hpp"
#include "mott/steady_state.hpp"

namespace mott {

struct LinearCoeffs {
  double a11 = 0;  // V
  double a12 = 0;  // Ohm
  double b11 = 0;  // 1/s
  double b12 = 0;  // 1/(s A)
};

struct VirtualElements {
  double R1 = 0, R2 = 0, C1 = 0;
  // R1 C1 = -1/b11, kept separately: C1 overflows when x_Q is tiny
  double tau = 0;
};

struct ImpedanceCoeffs {
  double a0 = 1, a1 = 0, b0 = 0, b1 = 0;
};

enum class ActivityClass { LP, EOC, LA_not_EOC };
std::string to_string(ActivityClass a);

struct PoleZero {
  double p = 0, z = 0, k = 0;
  ActivityClass activity_class = ActivityClass::LP;
};

struct ImpedanceSample {
  double omega = 0, re = 0, im = 0;
};

LinearCoeffs linearize(const FixedPoint1D& q, const ModelCoefficients& c);
VirtualElements virtual_elements(const LinearCoeffs& lc);
ImpedanceCoeffs impedance_coeffs(const VirtualElements& ve);
PoleZero pole_zero(const FixedPoint1D& q, const ModelCoefficients& c);
ActivityClass classify_activity(double p, double z);

ImpedanceSample impedance(const ImpedanceCoeffs& k, double omega);
ImpedanceSample impedance(const VirtualElements& ve, double omega);
ImpedanceSample impedance(const FixedPoint1D& q, double omega, const ModelCoefficients& c);

// R_omega + i L_omega omega form of the same response
struct SeriesRL {
  double R = 0, L = 0;
};
SeriesRL series_rl(const VirtualElements& ve, double omega);

// rad/s
std::optional<double> max_active_frequency(const FixedPoint1D& q, const ModelCoefficients& c);
// Hz; numerical argmax of |Im Z|
double imz_peak_frequency(const FixedPoint1D& q, const ModelCoefficients& c);

std::vector<ImpedanceSample> nyquist(const FixedPoint1D& q, const std::vector<double>& f_grid,
                                     const ModelCoefficients& c);

struct ContourSegment {
  double i0, f0, i1, f1;  // A, Hz
};

struct RezMap {
  std::vector<double> i_grid;       // A
  std::vector<double> f_grid;       // Hz
  std::vector<double> re;           // row-major [i][f]
  std::vector<ContourSegment> contour;
  double apex_i = 0, apex_f = 0;    // highest contour vertex
  double at(std::size_t ii, std::size_t jf) const { return re[ii * f_grid.size() + jf]; }
};

RezMap rez_map(const std::vector<double>& i_grid, const std::vector<double>& f_grid,
               const ModelCoefficients& c, unsigned jobs = 0);

std::vector<double> default_current_grid(std::size_t n = 400);    // 1e-6 .. 2e-3 A
std::vector<double> default_frequency_grid(std::size_t n = 400);  // 1e6 .. 1e12 Hz

// apex of the Re Z = 0 boundary: maximum of f_max over the NDR branch
struct EocApex {
  FixedPoint1D q;
  double f_max = 0;  // Hz
};
EocApex eoc_apex(const ModelCoefficients& c);

struct ScalingRow {
  double r_ch = 0, f_max = 0, i_at_apex = 0, x_at_apex = 0;
};
struct ScalingResult {
  std::vector<ScalingRow> rows;
  double slope = 0, intercept = 0, r2 = 0;  // i_at_apex vs r_ch, A/m
};
ScalingResult scaling_study(const std::vector<double>& r_ch_list, const DeviceParams& base,
                            unsigned jobs = 0);

}  // namespace mott
