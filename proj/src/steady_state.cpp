#include "mott/steady_state.hpp"

#include <algorithm>
#include <cmath>

#include "mott/numerics.hpp"

namespace mott {

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::semi_stable: return "semi-stable";
  }
  return "?";
}

double dc_current_at_state(StateFraction s, const ModelCoefficients& c) {
  const double x = s.x();
  return std::sqrt(-c.C * c.A * (1.0 + c.B * x * x) / s.log());
}

FixedPoint1D fixed_point_at_state(StateFraction s, const ModelCoefficients& c) {
  FixedPoint1D q;
  q.x_Q = s;
  q.i_Q = dc_current_at_state(s, c);
  q.r_Q = memristance(s, c);
  q.v_Q = q.r_Q * q.i_Q;
  return q;
}

FixedPoint1D fixed_point_at_current(double i, const ModelCoefficients& c) {
  if (!(i > 0.0) || !std::isfinite(i)) throw invalid_parameter("DC current must be positive");
  // i_Q grows monotonically with ln x; i_Q(u) < sqrt(CA(1+B)/|u|)
  const double u_lo = -1.01 * c.C * c.A * (1.0 + c.B) / (i * i) - 1.0;
  const double u_hi = -1e-15;
  auto g = [&](double u) { return dc_current_at_state(StateFraction::from_log(u), c) - i; };
  if (g(u_hi) < 0) throw domain_error("DC current beyond the representable locus");
  const double u = num::bisect(g, u_lo, u_hi, 1e-15);
  return fixed_point_at_state(StateFraction::from_log(u), c);
}

std::vector<StateFraction> default_x_grid(std::size_t n, double lo) {
  if (n < 4) throw invalid_parameter("grid needs at least 4 points");
  if (!(lo > 0 && lo < 0.5)) throw invalid_parameter("grid lower bound must be in (0, 0.5)");
  const std::size_t n_left = n / 2;
  const std::size_t n_right = n - n_left;
  std::vector<StateFraction> g;
  g.reserve(n);
  // left half in ln x, right half in ln(1-x); 0.5 belongs to the left
  for (double lx : num::linspace(std::log(lo), std::log(0.5), n_left))
    g.push_back(StateFraction::from_log(lx));
  const auto eps = num::logspace(0.5, lo, n_right + 1);
  for (std::size_t k = 1; k < eps.size(); ++k)
    g.push_back(StateFraction::from_log(std::log1p(-eps[k])));
  return g;
}

namespace {

double v_of_log(double u, const ModelCoefficients& c) {
  return fixed_point_at_state(StateFraction::from_log(u), c).v_Q;
}

}  // namespace

void critical_currents(DcLocus& locus, const ModelCoefficients& c) {
  const auto& pts = locus.points;
  std::size_t k_max = 0, k_min = 0;
  for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
    if (!k_max && pts[k].v_Q > pts[k - 1].v_Q && pts[k].v_Q >= pts[k + 1].v_Q) k_max = k;
    if (k_max && k > k_max && pts[k].v_Q < pts[k - 1].v_Q && pts[k].v_Q <= pts[k + 1].v_Q) {
      k_min = k;
      break;
    }
  }
  if (!k_max || !k_min) throw solver_error("v_Q extrema not bracketed by the locus grid");

  auto refine = [&](std::size_t k, bool maximize) {
    const double a = pts[k - 1].x_Q.log(), b = pts[k + 1].x_Q.log();
    auto f = [&](double u) { return v_of_log(u, c); };
    const double u = maximize ? num::golden_max(f, a, b, 1e-13).first
                              : num::golden_min(f, a, b, 1e-13).first;
    return fixed_point_at_state(StateFraction::from_log(u), c);
  };
  locus.peak = refine(k_max, true);
  locus.trough = refine(k_min, false);
  locus.i_c1 = locus.peak.i_Q;
  locus.i_c2 = locus.trough.i_Q;
}

DcLocus dc_locus(const std::vector<StateFraction>& grid, const ModelCoefficients& c) {
  if (grid.size() < 100) throw invalid_parameter("DC locus needs at least 100 grid points");
  DcLocus locus;
  locus.points.reserve(grid.size());
  for (const auto& s : grid) locus.points.push_back(fixed_point_at_state(s, c));
  std::sort(locus.points.begin(), locus.points.end(),
            [](const FixedPoint1D& a, const FixedPoint1D& b) { return a.x_Q.log() < b.x_Q.log(); });
  critical_currents(locus, c);
  return locus;
}

namespace {

const std::vector<StateFraction>& route_grid() {
  static const std::vector<StateFraction> g = default_x_grid(2000, 1e-12);
  return g;
}

double route_at(double u, double v0, const ModelCoefficients& c) {
  return kinetic_voltage(StateFraction::from_log(u), v0, c);
}

// |df/dv| * v * tol: the change in f that a relative voltage nudge produces
double voltage_slack(double u, double v0, const ModelCoefficients& c, double tol) {
  const auto s = StateFraction::from_log(u);
  const double x = s.x(), l = s.log();
  const double g = 1.0 / memristance(s, c);
  return std::abs(4.0 * x * l * l * g * v0 * v0 * tol / (c.D * heat_bracket(s, c)));
}

}  // namespace

std::vector<StateRoot> fixed_points_const_voltage(double v0, const ModelCoefficients& c,
                                                  double tangency_tol) {
  if (!(v0 >= 0.0)) throw domain_error("bias voltage must be non-negative");
  const auto& grid = route_grid();
  const std::size_t n = grid.size();
  std::vector<double> u(n), f(n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = grid[k].log();
    f[k] = kinetic_voltage(grid[k], v0, c);
  }
  auto fu = [&](double t) { return route_at(t, v0, c); };

  struct Hit {
    double u;
    Stability st;
  };
  std::vector<Hit> hits;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const bool a = f[k] > 0, b = f[k + 1] > 0;
    if (a == b) continue;
    const double r = num::bisect(fu, u[k], u[k + 1], 1e-14);
    hits.push_back({r, a ? Stability::stable : Stability::unstable});
  }
  // two sign changes enclosing a barely-crossing extremum are one touching root
  std::vector<Hit> merged;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    if (k + 1 < hits.size()) {
      const bool bump_up = hits[k].st == Stability::unstable;
      auto ext = bump_up ? num::golden_max(fu, hits[k].u, hits[k + 1].u, 1e-13)
                         : num::golden_min(fu, hits[k].u, hits[k + 1].u, 1e-13);
      if (std::abs(ext.second) <= voltage_slack(ext.first, v0, c, tangency_tol)) {
        merged.push_back({ext.first, Stability::semi_stable});
        ++k;
        continue;
      }
    }
    merged.push_back(hits[k]);
  }
  // touching extrema that never change sign on the grid
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const bool loc_max = f[k] >= f[k - 1] && f[k] >= f[k + 1] && f[k] <= 0;
    const bool loc_min = f[k] <= f[k - 1] && f[k] <= f[k + 1] && f[k] > 0;
    if (!loc_max && !loc_min) continue;
    auto ext = loc_max ? num::golden_max(fu, u[k - 1], u[k + 1], 1e-13)
                       : num::golden_min(fu, u[k - 1], u[k + 1], 1e-13);
    if (std::abs(ext.second) > voltage_slack(ext.first, v0, c, tangency_tol)) continue;
    // already represented by a nearby root?
    bool dup = false;
    for (const auto& h : merged)
      if (std::abs(std::exp(h.u) - std::exp(ext.first)) <= 1e-9) dup = true;
    if (!dup) merged.push_back({ext.first, Stability::semi_stable});
  }
  std::sort(merged.begin(), merged.end(), [](const Hit& a, const Hit& b) { return a.u < b.u; });

  std::vector<StateRoot> out;
  for (const auto& h : merged) {
    const auto s = StateFraction::from_log(h.u);
    if (!out.empty() && std::abs(out.back().x.x() - s.x()) <= 1e-9 &&
        std::abs(out.back().x.log() - h.u) <= 1e-9)
      continue;
    out.push_back({s, h.st});
  }
  return out;
}

double dynamic_route_max(double v0, const ModelCoefficients& c) {
  const auto& grid = route_grid();
  const std::size_t n = grid.size();
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = kinetic_voltage(grid[k], v0, c);
  double best = std::max(f.front(), f.back());
  auto fu = [&](double t) { return route_at(t, v0, c); };
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (f[k] >= f[k - 1] && f[k] >= f[k + 1]) {
      auto m = num::golden_max(fu, grid[k - 1].log(), grid[k + 1].log(), 1e-14);
      best = std::max({best, m.second, f[k]});
    }
  }
  return best;
}

SaddleNodeResult saddle_node_voltage(const ModelCoefficients& c) {
  double lo = 0.0, hi = 0.01;
  if (dynamic_route_max(lo, c) >= 0) throw solver_error("dynamic route positive at zero bias");
  while (dynamic_route_max(hi, c) < 0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) throw solver_error("no saddle-node voltage below 1 kV");
  }
  // sign-only bisection: the route max is continuous but its magnitude is stiff
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dynamic_route_max(mid, c) < 0 ? lo : hi) = mid;
  }
  SaddleNodeResult r;
  r.v_star = 0.5 * (lo + hi);
  r.root_pairs = fixed_points_const_voltage(r.v_star, c);
  r.roots_at = static_cast<int>(r.root_pairs.size());
  r.roots_below = static_cast<int>(fixed_points_const_voltage(r.v_star - 1e-3, c).size());
  r.roots_above = static_cast<int>(fixed_points_const_voltage(r.v_star + 1e-3, c).size());
  return r;
}

}  // namespace mott
