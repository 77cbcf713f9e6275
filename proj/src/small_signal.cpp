#include "mott/small_signal.hpp"

#include <cmath>
#include <numbers>

#include "mott/numerics.hpp"

namespace mott {

std::string to_string(ActivityClass a) {
  switch (a) {
    case ActivityClass::LP: return "LP";
    case ActivityClass::EOC: return "EOC";
    case ActivityClass::LA_not_EOC: return "LA_not_EOC";
  }
  return "?";
}

LinearCoeffs linearize(const FixedPoint1D& q, const ModelCoefficients& c) {
  const double x = q.x_Q.x(), l = q.x_Q.log(), i = q.i_Q;
  const double bx2 = c.B * x * x;
  const double den = c.A * (1.0 + bx2);
  const double br = heat_bracket(q.x_Q, c);

  LinearCoeffs lc;
  lc.a11 = -2.0 * c.B * x * i / (den * (1.0 + bx2));
  lc.a12 = memristance(q.x_Q, c);

  // f = (X i^2 + Y) / Z, differentiated term by term
  const double X = 2.0 * x * l * l / den;
  const double Y = 2.0 * c.C * x * l;
  const double Z = c.D * br;
  const double Xp = 2.0 * l * (2.0 * bx2 - bx2 * l + l + 2.0) / (den * (1.0 + bx2));
  const double Yp = 2.0 * c.C * (l + 1.0);
  const double Zp = 4.0 * c.D * x * l * (1.0 + c.E * (l + 1.0));
  lc.b11 = i * i * (Xp * Z - X * Zp) / (Z * Z) + (Yp * Z - Y * Zp) / (Z * Z);
  lc.b12 = 2.0 * X * i / Z;
  return lc;
}

VirtualElements virtual_elements(const LinearCoeffs& lc) {
  const double ab = lc.a11 * lc.b12;
  if (ab == 0.0 || lc.b11 == 0.0 || !std::isfinite(ab) || !std::isfinite(lc.b11))
    throw domain_error("degenerate linearization (zero bias current?)");
  VirtualElements ve;
  ve.R1 = -ab / lc.b11;
  ve.R2 = lc.a12;
  ve.C1 = 1.0 / ab;
  ve.tau = -1.0 / lc.b11;
  return ve;
}

ImpedanceCoeffs impedance_coeffs(const VirtualElements& ve) {
  ImpedanceCoeffs k;
  k.a0 = 1.0;
  k.a1 = ve.tau;
  k.b0 = ve.R1 + ve.R2;
  k.b1 = ve.R2 * ve.tau;
  return k;
}

ActivityClass classify_activity(double p, double z) {
  if (p >= 0) return ActivityClass::LA_not_EOC;
  return z > 0 ? ActivityClass::EOC : ActivityClass::LP;
}

PoleZero pole_zero(const FixedPoint1D& q, const ModelCoefficients& c) {
  if (!(q.i_Q > 0)) throw domain_error("pole/zero undefined at zero bias");
  const auto lc = linearize(q, c);
  const auto ve = virtual_elements(lc);
  PoleZero pz;
  pz.p = lc.b11;
  pz.z = -(ve.R1 + ve.R2) / (ve.R2 * ve.tau);
  pz.k = ve.R2;
  pz.activity_class = classify_activity(pz.p, pz.z);
  return pz;
}

ImpedanceSample impedance(const ImpedanceCoeffs& k, double w) {
  const double den = k.a0 * k.a0 + k.a1 * k.a1 * w * w;
  ImpedanceSample s;
  s.omega = w;
  s.re = (k.a0 * k.b0 + k.a1 * k.b1 * w * w) / den;
  s.im = (k.a0 * k.b1 - k.a1 * k.b0) * w / den;
  return s;
}

// Z = R2 + R1/(1 + i w R1 C1); avoids the b1 a0 - b0 a1 cancellation when R1 << R2
ImpedanceSample impedance(const VirtualElements& ve, double w) {
  const double t = w * ve.tau;
  const double den = 1.0 + t * t;
  ImpedanceSample s;
  s.omega = w;
  s.re = ve.R2 + ve.R1 / den;
  s.im = -ve.R1 * t / den;
  return s;
}

ImpedanceSample impedance(const FixedPoint1D& q, double omega, const ModelCoefficients& c) {
  return impedance(virtual_elements(linearize(q, c)), omega);
}

SeriesRL series_rl(const VirtualElements& ve, double w) {
  const double t = ve.tau;
  const double den = 1.0 + w * w * t * t;
  return {ve.R2 + ve.R1 / den, -ve.R1 * t / den};
}

std::optional<double> max_active_frequency(const FixedPoint1D& q, const ModelCoefficients& c) {
  const auto k = impedance_coeffs(virtual_elements(linearize(q, c)));
  const double ratio = k.a0 * k.b0 / (k.a1 * k.b1);
  if (!(ratio < 0)) return std::nullopt;
  return std::sqrt(-ratio);
}

double imz_peak_frequency(const FixedPoint1D& q, const ModelCoefficients& c) {
  const auto lc = linearize(q, c);
  const auto ve = virtual_elements(lc);
  // bracket generously around the pole magnitude, then search in log omega
  const double w0 = std::abs(lc.b11);
  auto f = [&](double lw) { return std::abs(impedance(ve, std::exp(lw)).im); };
  const double lw = num::golden_max(f, std::log(w0) - 7.0, std::log(w0) + 7.0, 1e-14).first;
  return std::exp(lw) / (2.0 * std::numbers::pi);
}

std::vector<ImpedanceSample> nyquist(const FixedPoint1D& q, const std::vector<double>& f_grid,
                                     const ModelCoefficients& c) {
  const auto ve = virtual_elements(linearize(q, c));
  std::vector<ImpedanceSample> out;
  out.reserve(f_grid.size());
  for (double f : f_grid) out.push_back(impedance(ve, 2.0 * std::numbers::pi * f));
  return out;
}

std::vector<double> default_current_grid(std::size_t n) { return num::logspace(1e-6, 2e-3, n); }
std::vector<double> default_frequency_grid(std::size_t n) { return num::logspace(1e6, 1e12, n); }

namespace {

// marching squares over one cell; corners in (log i, log f)
void cell_contour(double li0, double li1, double lf0, double lf1, double v00, double v10,
                  double v11, double v01, std::vector<ContourSegment>& out) {
  struct P {
    double li, lf;
  };
  auto lerp = [](double a, double b, double va, double vb) { return a + (b - a) * va / (va - vb); };
  std::vector<P> pts;
  // edges in order: bottom (f0), right (i1), top (f1), left (i0)
  if ((v00 > 0) != (v10 > 0)) pts.push_back({lerp(li0, li1, v00, v10), lf0});
  if ((v10 > 0) != (v11 > 0)) pts.push_back({li1, lerp(lf0, lf1, v10, v11)});
  if ((v11 > 0) != (v01 > 0)) pts.push_back({lerp(li1, li0, v11, v01), lf1});
  if ((v01 > 0) != (v00 > 0)) pts.push_back({li0, lerp(lf1, lf0, v01, v00)});
  auto emit = [&](const P& a, const P& b) {
    out.push_back({std::exp(a.li), std::exp(a.lf), std::exp(b.li), std::exp(b.lf)});
  };
  if (pts.size() == 2) {
    emit(pts[0], pts[1]);
  } else if (pts.size() == 4) {
    // saddle cell: decide the pairing by the sign of the centre value
    const double centre = 0.25 * (v00 + v10 + v11 + v01);
    if ((centre > 0) == (v00 > 0)) {
      emit(pts[0], pts[1]);
      emit(pts[2], pts[3]);
    } else {
      emit(pts[0], pts[3]);
      emit(pts[1], pts[2]);
    }
  }
}

}  // namespace

RezMap rez_map(const std::vector<double>& i_grid, const std::vector<double>& f_grid,
               const ModelCoefficients& c, unsigned jobs) {
  if (i_grid.size() < 2 || f_grid.size() < 2) throw invalid_parameter("rez_map needs 2x2 grid");
  for (std::size_t k = 0; k < i_grid.size(); ++k)
    if (!(i_grid[k] > 0) || (k && i_grid[k] <= i_grid[k - 1]))
      throw invalid_parameter("current grid must be positive and increasing");
  for (std::size_t k = 0; k < f_grid.size(); ++k)
    if (!(f_grid[k] > 0) || (k && f_grid[k] <= f_grid[k - 1]))
      throw invalid_parameter("frequency grid must be positive and increasing");

  RezMap m;
  m.i_grid = i_grid;
  m.f_grid = f_grid;
  const std::size_t ni = i_grid.size(), nf = f_grid.size();
  auto rows = num::parallel_map<std::vector<double>>(ni, jobs, [&](std::size_t ii) {
    const auto q = fixed_point_at_current(i_grid[ii], c);
    const auto ve = virtual_elements(linearize(q, c));
    std::vector<double> row(nf);
    for (std::size_t jf = 0; jf < nf; ++jf)
      row[jf] = impedance(ve, 2.0 * std::numbers::pi * f_grid[jf]).re;
    return row;
  });
  m.re.reserve(ni * nf);
  for (auto& r : rows) m.re.insert(m.re.end(), r.begin(), r.end());

  for (std::size_t ii = 0; ii + 1 < ni; ++ii) {
    const double li0 = std::log(i_grid[ii]), li1 = std::log(i_grid[ii + 1]);
    for (std::size_t jf = 0; jf + 1 < nf; ++jf) {
      cell_contour(li0, li1, std::log(f_grid[jf]), std::log(f_grid[jf + 1]), m.at(ii, jf),
                   m.at(ii + 1, jf), m.at(ii + 1, jf + 1), m.at(ii, jf + 1), m.contour);
    }
  }
  for (const auto& s : m.contour) {
    if (s.f0 > m.apex_f) {
      m.apex_f = s.f0;
      m.apex_i = s.i0;
    }
    if (s.f1 > m.apex_f) {
      m.apex_f = s.f1;
      m.apex_i = s.i1;
    }
  }
  return m;
}

EocApex eoc_apex(const ModelCoefficients& c) {
  const auto locus = dc_locus(default_x_grid(), c);
  const double ua = locus.peak.x_Q.log(), ub = locus.trough.x_Q.log();
  auto fmax_of = [&](double u) {
    const auto q = fixed_point_at_state(StateFraction::from_log(u), c);
    const auto w = max_active_frequency(q, c);
    return w ? *w : 0.0;
  };
  // coarse scan first: the admissible window is narrow near its ends
  const std::size_t n = 400;
  const auto us = num::linspace(ua, ub, n);
  std::size_t best = 1;
  double fbest = -1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double f = fmax_of(us[k]);
    if (f > fbest) {
      fbest = f;
      best = k;
    }
  }
  const double u = num::golden_max(fmax_of, us[best - 1], us[best + 1], 1e-12).first;
  EocApex a;
  a.q = fixed_point_at_state(StateFraction::from_log(u), c);
  a.f_max = fmax_of(u) / (2.0 * std::numbers::pi);
  return a;
}

ScalingResult scaling_study(const std::vector<double>& r_ch_list, const DeviceParams& base,
                            unsigned jobs) {
  ScalingResult r;
  r.rows = num::parallel_map<ScalingRow>(r_ch_list.size(), jobs, [&](std::size_t k) {
    DeviceParams p = base;
    p.r_ch = r_ch_list[k];
    const auto a = eoc_apex(derive_coefficients(p));
    return ScalingRow{p.r_ch, a.f_max, a.q.i_Q, a.q.x_Q.x()};
  });
  if (r.rows.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& row : r.rows) {
      xs.push_back(row.r_ch);
      ys.push_back(row.i_at_apex);
    }
    const auto fit = num::linear_fit(xs, ys);
    r.slope = fit.slope;
    r.intercept = fit.intercept;
    r.r2 = fit.r2;
  }
  return r;
}

}  // namespace mott
