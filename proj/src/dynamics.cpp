#include "mott/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mott/numerics.hpp"

namespace mott {

std::string to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::converged_fixed_point: return "converged_fixed_point";
    case TrajectoryStatus::periodic: return "periodic";
    case TrajectoryStatus::horizon_reached: return "horizon_reached";
    case TrajectoryStatus::clamped: return "clamped";
  }
  return "?";
}

std::string to_string(CycleVerdict v) {
  switch (v) {
    case CycleVerdict::fixed_point: return "fixed_point";
    case CycleVerdict::limit_cycle: return "limit_cycle";
    case CycleVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

double Trajectory::x(std::size_t k) const { return std::exp(lnx[k]); }

IntegrateOptions default_options(const CircuitParams& cp) {
  IntegrateOptions o;
  o.max_step = cp.Rs * cp.Cp / 400.0;
  return o;
}

namespace {

using Vec = std::array<double, 2>;

// onset refinement gives up lengthening the horizon beyond this factor
constexpr double max_horizon_scale = 8.0;

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Rhs {
  const CircuitParams& cp;
  const ModelCoefficients& c;
  // false when the stage left the physical domain (x >= 1)
  bool operator()(const Vec& y, Vec& dy) const {
    if (!(y[0] < 0.0) || !std::isfinite(y[1])) return false;
    const auto s = StateFraction::from_log(y[0]);
    const double x = s.x();
    dy[0] = log_rate_voltage(s, y[1], c);
    dy[1] = ((cp.Vdc - y[1]) / cp.Rs - y[1] * c.A * (1.0 + c.B * x * x)) / cp.Cp;
    return std::isfinite(dy[0]) && std::isfinite(dy[1]);
  }
};

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (const auto& [w, k] : terms) {
    out[0] += h * w * (*k)[0];
    out[1] += h * w * (*k)[1];
  }
  return out;
}

}  // namespace

Trajectory integrate(std::array<double, 2> ic, const CircuitParams& cp, const ModelCoefficients& c,
                     double horizon, const IntegrateOptions& o) {
  cp.validate();
  if (!(ic[0] > 0 && ic[0] < 1)) throw domain_error("initial x must lie in (0, 1)");
  if (!std::isfinite(ic[1])) throw domain_error("initial v must be finite");
  if (!(horizon > 0)) throw invalid_parameter("horizon must be positive");

  const Rhs f{cp, c};
  const double u_lo = std::log(o.x_lo), u_hi = std::log(o.x_hi);
  Trajectory tr;
  Vec y{std::log(ic[0]), ic[1]};
  Vec k1, k2, k3, k4, k5, k6, k7;
  if (!f(y, k1)) throw domain_error("initial state outside the model domain");

  double t = 0.0;
  auto record = [&] {
    if (t >= o.record_from) {
      tr.t.push_back(t);
      tr.lnx.push_back(y[0]);
      tr.v.push_back(y[1]);
    }
  };
  record();

  const bool fixed = o.fixed_step > 0;
  double h = fixed ? o.fixed_step : std::min(1e-15, horizon);
  std::size_t steps = 0;
  while (t < horizon) {
    if (++steps > o.max_steps) throw solver_error("step budget exhausted");
    if (o.max_step > 0) h = std::min(h, o.max_step);
    h = std::min(h, horizon - t);

    bool ok = f(axpy(y, h, {{a21, &k1}}), k2) &&
              f(axpy(y, h, {{a31, &k1}, {a32, &k2}}), k3) &&
              f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), k4) &&
              f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), k5) &&
              f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), k6);
    Vec y5{};
    if (ok) {
      y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      ok = y5[0] >= u_lo && y5[0] <= u_hi && f(y5, k7);
    }
    if (!ok) {
      // outside the clamp band: retry at half size, give up at h_min
      ++tr.rejected;
      if (fixed) throw domain_error("fixed step left the model domain");
      h *= 0.5;
      if (h < o.h_min) {
        tr.status = TrajectoryStatus::clamped;
        break;
      }
      continue;
    }

    double err = 0.0;
    if (!fixed) {
      const Vec atol{o.tol.atol_lnx, o.tol.atol_v};
      for (int i = 0; i < 2; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
        const double sc = atol[i] + o.tol.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(e) / sc);
      }
    }
    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
      ++tr.accepted;
      record();
      if (!fixed) {
        const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
      }
    } else {
      ++tr.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < o.h_min) throw stiffness_error("step size underflow at t = " + std::to_string(t));
    }
  }
  if (tr.t.empty() || tr.t.back() != t) record();
  return tr;
}

namespace {

// upward crossings of `level` with hysteresis `band`, linearly interpolated
std::vector<double> upward_crossings(const std::vector<double>& t, const std::vector<double>& y,
                                     std::size_t from, double level, double band) {
  std::vector<double> out;
  bool armed = false;
  for (std::size_t k = from; k + 1 < y.size(); ++k) {
    if (y[k] < level - band) armed = true;
    if (armed && y[k] < level && y[k + 1] >= level) {
      const double w = (level - y[k]) / (y[k + 1] - y[k]);
      out.push_back(t[k] + w * (t[k + 1] - t[k]));
      armed = false;
    }
  }
  return out;
}

void period_stats(const std::vector<double>& cr, double& mean, double& rel_std) {
  mean = 0;
  rel_std = 0;
  if (cr.size() < 2) return;
  const std::size_t n = cr.size() - 1;
  mean = (cr.back() - cr.front()) / n;
  double ss = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = cr[k + 1] - cr[k] - mean;
    ss += d * d;
  }
  rel_std = n > 1 ? std::sqrt(ss / (n - 1)) / mean : 0.0;
}

std::pair<double, double> range_of(const std::vector<double>& y, std::size_t a, std::size_t b) {
  double lo = y[a], hi = y[a];
  for (std::size_t k = a; k < b; ++k) {
    lo = std::min(lo, y[k]);
    hi = std::max(hi, y[k]);
  }
  return {lo, hi};
}

}  // namespace

CycleReport detect_limit_cycle(const Trajectory& tr, const CircuitParams& cp) {
  CycleReport rep;
  const std::size_t n = tr.t.size();
  if (n < 16) return rep;
  const double t0 = tr.t.front(), t_end = tr.t.back();
  const auto& v = tr.v;

  // transient: first pair of consecutive cycle amplitudes agreeing to 0.1%
  double t_start = t0 + 0.6 * (t_end - t0);
  {
    std::vector<std::pair<double, double>> amps;  // (time of max, max - next min)
    std::size_t k = 1;
    while (k + 1 < n) {
      if (v[k] > v[k - 1] && v[k] >= v[k + 1]) {
        std::size_t j = k + 1;
        while (j + 1 < n && !(v[j] < v[j - 1] && v[j] <= v[j + 1])) ++j;
        if (j + 1 >= n) break;
        amps.emplace_back(tr.t[k], v[k] - v[j]);
        k = j;
      }
      ++k;
    }
    for (std::size_t j = 0; j + 1 < amps.size(); ++j) {
      const double a = amps[j].second, b = amps[j + 1].second;
      if (b > 1e-3 * cp.Vdc && std::abs(a - b) < 1e-3 * b) {
        t_start = std::min(t_start, amps[j].first);
        break;
      }
    }
  }
  rep.t_transient = t_start;
  const std::size_t i0 = static_cast<std::size_t>(
      std::lower_bound(tr.t.begin(), tr.t.end(), t_start) - tr.t.begin());
  const double t_mid = 0.5 * (t_start + t_end);
  const std::size_t im = static_cast<std::size_t>(
      std::lower_bound(tr.t.begin(), tr.t.end(), t_mid) - tr.t.begin());
  if (n - i0 < 8 || im <= i0 || n - im < 4) return rep;

  const auto [vlo, vhi] = range_of(v, i0, n);
  const double swing1 = [&] { auto r = range_of(v, i0, im); return r.second - r.first; }();
  const double swing2 = [&] { auto r = range_of(v, im, n); return r.second - r.first; }();
  rep.swing = vhi - vlo;
  rep.x_fp = tr.x(n - 1);
  rep.v_fp = v.back();

  const double mid = 0.5 * (vlo + vhi);
  const auto cr = upward_crossings(tr.t, v, i0, mid, 0.1 * rep.swing);
  const auto cr2 = upward_crossings(tr.t, v, im, mid, 0.1 * rep.swing);

  // oscillation predicate: >1% Vdc swing, not decaying, >= 5 cycles
  if (swing2 > 0.01 * cp.Vdc && swing2 >= 0.5 * swing1 && cr2.size() >= 6) {
    rep.verdict = CycleVerdict::limit_cycle;
    auto& lc = rep.lc;
    period_stats(cr, lc.T_lc, lc.period_rel_std);
    lc.n_periods_used = cr.size() - 1;
    lc.v_min = vlo;
    lc.v_max = vhi;
    const auto [ulo, uhi] = range_of(tr.lnx, i0, n);
    lc.x_min = std::exp(ulo);
    lc.x_max = std::exp(uhi);
    const auto crx = upward_crossings(tr.t, tr.lnx, i0, 0.5 * (ulo + uhi), 0.1 * (uhi - ulo));
    double sx = 0;
    period_stats(crx, lc.T_lc_x, sx);
    // one period of samples between the last two v crossings
    const double ta = cr[cr.size() - 2], tb = cr.back();
    for (std::size_t k = i0; k < n; ++k)
      if (tr.t[k] >= ta && tr.t[k] <= tb) lc.cycle.push_back({tr.t[k], tr.x(k), v[k]});
    return rep;
  }
  if (swing2 < 1e-9 * cp.Vdc || (swing2 < 0.01 * cp.Vdc && swing2 < swing1)) {
    rep.verdict = CycleVerdict::fixed_point;
  }
  return rep;
}

double winding_turns(const Trajectory& tr, double x_c, double v_c, double t_from) {
  const double uc = std::log(x_c);
  double total = 0, prev = 0;
  bool first = true;
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    if (tr.t[k] < t_from) continue;
    // orientation is preserved by the monotone map x -> ln x
    const double a = std::atan2(tr.v[k] - v_c, tr.lnx[k] - uc);
    if (!first) {
      double d = a - prev;
      if (d > std::numbers::pi) d -= 2 * std::numbers::pi;
      if (d < -std::numbers::pi) d += 2 * std::numbers::pi;
      total += d;
    }
    prev = a;
    first = false;
  }
  return total / (2 * std::numbers::pi);
}

std::vector<std::array<double, 2>> ic_grid(std::size_t nx, std::size_t nv, double x_lo,
                                           double x_hi, double v_lo, double v_hi) {
  std::vector<std::array<double, 2>> out;
  for (double x : num::linspace(x_lo, x_hi, nx))
    for (double v : num::linspace(v_lo, v_hi, nv)) out.push_back({x, v});
  return out;
}

Portrait phase_portrait(const std::vector<std::array<double, 2>>& ics, const CircuitParams& cp,
                        const ModelCoefficients& c, double horizon, unsigned jobs) {
  const auto fps = circuit_fixed_points(cp, c);
  const double xc = fps.empty() ? 0.3 : fps.back().x_Q.x();
  const double vc = fps.empty() ? 0.1 : fps.back().v_Q;
  Portrait p;
  p.orbits = num::parallel_map<OrbitSummary>(ics.size(), jobs, [&](std::size_t k) {
    const auto tr = integrate(ics[k], cp, c, horizon, default_options(cp));
    OrbitSummary o;
    o.x0 = ics[k][0];
    o.v0 = ics[k][1];
    o.report = detect_limit_cycle(tr, cp);
    o.winding = winding_turns(tr, xc, vc, o.report.t_transient);
    return o;
  });
  bool first = true;
  for (const auto& o : p.orbits) {
    switch (o.report.verdict) {
      case CycleVerdict::limit_cycle:
        ++p.n_cycle;
        if (first) {
          p.period_min = p.period_max = o.report.lc.T_lc;
          first = false;
        }
        p.period_min = std::min(p.period_min, o.report.lc.T_lc);
        p.period_max = std::max(p.period_max, o.report.lc.T_lc);
        break;
      case CycleVerdict::fixed_point: ++p.n_fixed; break;
      case CycleVerdict::inconclusive: ++p.n_inconclusive; break;
    }
  }
  return p;
}

bool oscillates(const CycleReport& r) { return r.verdict == CycleVerdict::limit_cycle; }

double default_resolution(CircuitParam p) {
  switch (p) {
    case CircuitParam::Rs: return 1e-3;
    case CircuitParam::Cp: return 1e-18;
    case CircuitParam::Vdc: return 1e-3;
  }
  return 0;
}

CycleReport simulate_and_classify(CircuitParam vary, double value, const CircuitParams& fixed,
                                  const ModelCoefficients& c, const SweepOptions& opt,
                                  double horizon_scale) {
  CircuitParams p = fixed;
  set(p, vary, value);
  const double horizon =
      horizon_scale * (opt.horizon > 0 ? opt.horizon : std::max(1e-6, 200.0 * p.Rs * p.Cp));
  const auto tr = integrate(opt.ic, p, c, horizon, default_options(p));
  return detect_limit_cycle(tr, p);
}

BifurcationDiagram bifurcation_sweep(CircuitParam vary, const std::vector<double>& grid,
                                     const CircuitParams& fixed, const ModelCoefficients& c,
                                     const SweepOptions& opt) {
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw invalid_parameter("sweep grid must be increasing");
  BifurcationDiagram d;
  d.param = vary;
  auto reports = num::parallel_map<CycleReport>(grid.size(), opt.jobs, [&](std::size_t k) {
    return simulate_and_classify(vary, grid[k], fixed, c, opt);
  });
  for (std::size_t k = 0; k < grid.size(); ++k) d.points.push_back({grid[k], reports[k]});
  if (!opt.refine) {
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
      if (oscillates(reports[k]) != oscillates(reports[k + 1]))
        d.onsets.push_back({grid[k], grid[k + 1], !oscillates(reports[k]), false});
    return d;
  }

  const double res = opt.resolution > 0 ? opt.resolution : default_resolution(vary);
  std::vector<std::size_t> edges;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k)
    if (oscillates(reports[k]) != oscillates(reports[k + 1])) edges.push_back(k);
  d.onsets = num::parallel_map<Onset>(edges.size(), opt.jobs, [&](std::size_t e) {
    const std::size_t k = edges[e];
    const bool osc_lo = oscillates(reports[k]);
    Onset o;
    o.rising = !osc_lo;
    // near a Hopf point the cycle grows slowly, so the bracket found with a
    // short horizon can move when the horizon doubles; lengthen and redo
    for (double scale = 1.0; scale <= max_horizon_scale; scale *= 2.0) {
      o.lo = grid[k];
      o.hi = grid[k + 1];
      while (o.hi - o.lo > res) {
        const double m = 0.5 * (o.lo + o.hi);
        (oscillates(simulate_and_classify(vary, m, fixed, c, opt, scale)) == osc_lo ? o.lo : o.hi) = m;
      }
      o.verified = oscillates(simulate_and_classify(vary, o.lo, fixed, c, opt, 2.0 * scale)) == osc_lo &&
                   oscillates(simulate_and_classify(vary, o.hi, fixed, c, opt, 2.0 * scale)) != osc_lo;
      if (o.verified) break;
    }
    return o;
  });
  return d;
}

}  // namespace mott
