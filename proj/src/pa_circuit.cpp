#include "mott/pa_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mott/numerics.hpp"

namespace mott {

void CircuitParams::validate() const {
  if (!(Rs > 0) || !(Cp > 0) || !(Vdc > 0) || !std::isfinite(Rs) || !std::isfinite(Cp) ||
      !std::isfinite(Vdc))
    throw invalid_parameter("Rs, Cp and Vdc must be positive");
}

CircuitParam parse_circuit_param(std::string_view s) {
  if (s == "rs" || s == "Rs") return CircuitParam::Rs;
  if (s == "cp" || s == "Cp") return CircuitParam::Cp;
  if (s == "vdc" || s == "Vdc") return CircuitParam::Vdc;
  throw invalid_parameter("unknown circuit parameter '" + std::string(s) + "'");
}

std::string to_string(CircuitParam p) {
  switch (p) {
    case CircuitParam::Rs: return "rs";
    case CircuitParam::Cp: return "cp";
    case CircuitParam::Vdc: return "vdc";
  }
  return "?";
}

double get(const CircuitParams& cp, CircuitParam which) {
  switch (which) {
    case CircuitParam::Rs: return cp.Rs;
    case CircuitParam::Cp: return cp.Cp;
    case CircuitParam::Vdc: return cp.Vdc;
  }
  return 0;
}

void set(CircuitParams& cp, CircuitParam which, double value) {
  switch (which) {
    case CircuitParam::Rs: cp.Rs = value; break;
    case CircuitParam::Cp: cp.Cp = value; break;
    case CircuitParam::Vdc: cp.Vdc = value; break;
  }
}

TrDetClass classify_trdet(double tr, double det, double disc, const TrDetTolerance& tol,
                          bool complete) {
  const int st = std::abs(tr) <= tol.tr ? 0 : (tr > 0 ? 1 : -1);
  const int sd = std::abs(det) <= tol.det ? 0 : (det > 0 ? 1 : -1);
  const int sp = std::abs(disc) <= tol.disc ? 0 : (disc > 0 ? 1 : -1);
  if (sd < 0) return {1, "saddle point", false};
  if (sd == 0) {
    if (st < 0) return {2, "stable line of fixed points", true};
    if (st == 0) return {3, "parallel lines or plane of fixed points", true};
    return {4, "unstable line of fixed points", true};
  }
  if (st == 0) return {9, "center", true};
  if (st < 0) {
    if (sp > 0) return {5, "stable node", false};
    if (sp == 0) return complete ? TrDetClass{7, "stable star", true}
                                 : TrDetClass{6, "stable degenerate node", true};
    return {8, "stable spiral", false};
  }
  if (sp < 0) return {10, "unstable spiral", false};
  if (sp == 0) return complete ? TrDetClass{12, "unstable star", true}
                               : TrDetClass{11, "unstable degenerate node", true};
  return {13, "unstable node", false};
}

std::array<double, 2> circuit_rhs(StateFraction x, double v, const CircuitParams& cp,
                                  const ModelCoefficients& c) {
  const double g = 1.0 / memristance(x, c);
  return {kinetic_voltage(x, v, c), ((cp.Vdc - v) / cp.Rs - v * g) / cp.Cp};
}

CircuitOperatingPoint jacobian(StateFraction x_Q, double v_Q, const CircuitParams& cp,
                               const ModelCoefficients& c) {
  cp.validate();
  CircuitOperatingPoint op;
  op.x_Q = x_Q;
  op.v_Q = v_Q;
  op.r_Q = memristance(x_Q, c);
  op.i_Q = v_Q / op.r_Q;

  FixedPoint1D q{x_Q, op.i_Q, v_Q, op.r_Q};
  const auto lc = linearize(q, c);
  const double R = op.r_Q;
  op.jac[0][0] = lc.b11 - lc.b12 * lc.a11 / R;
  op.jac[0][1] = lc.b12 / R;
  op.jac[1][0] = lc.a11 / (R * cp.Cp);
  op.jac[1][1] = -(1.0 / (cp.Rs * cp.Cp) + 1.0 / (R * cp.Cp));

  op.tr = op.jac[0][0] + op.jac[1][1];
  op.det = op.jac[0][0] * op.jac[1][1] - op.jac[0][1] * op.jac[1][0];
  op.disc = op.tr * op.tr - 4.0 * op.det;
  const std::complex<double> sq = std::sqrt(std::complex<double>(op.disc, 0.0));
  op.eigs = {0.5 * (op.tr + sq), 0.5 * (op.tr - sq)};

  op.omega0 = 1.0 / (cp.Rs * cp.Cp);
  op.omega1 = -lc.b11;  // 1/(R1 C1)
  if (lc.a11 * lc.b12 != 0.0) {
    const auto ve = virtual_elements(lc);
    op.gamma1 = ve.R1 / R;
  }
  op.gammas = cp.Rs / R;

  const double jscale = std::abs(op.jac[0][0] * op.jac[1][1]) + std::abs(op.jac[0][1] * op.jac[1][0]);
  TrDetTolerance tol;
  tol.tr = 1e-6 * std::abs(op.omega0);
  tol.det = 1e-12 * jscale;
  tol.disc = 1e-12 * (op.tr * op.tr + 4.0 * std::abs(op.det));
  const bool complete = op.jac[0][1] == 0.0 && op.jac[1][0] == 0.0 && op.jac[0][0] == op.jac[1][1];
  op.trdet = classify_trdet(op.tr, op.det, op.disc, tol, complete);
  return op;
}

TransferPoles transfer_poles(const FixedPoint1D& q, const CircuitParams& cp,
                             const ModelCoefficients& c) {
  cp.validate();
  const auto pz = pole_zero(q, c);
  const double w0 = 1.0 / (cp.Rs * cp.Cp);
  const double g = cp.Rs / q.r_Q;  // k is replaced by R_ch
  TransferPoles t;
  t.k_prime = w0;
  t.d2 = 1.0;
  t.d1 = (1.0 + g) * w0 - pz.z;
  t.d0 = -g * w0 * pz.p - w0 * pz.z;
  t.zero = pz.z;
  t.discriminant = t.d1 * t.d1 - 4.0 * t.d0;
  const std::complex<double> sq = std::sqrt(std::complex<double>(t.discriminant, 0.0));
  t.p_plus = 0.5 * (-t.d1 + sq);
  t.p_minus = 0.5 * (-t.d1 - sq);
  return t;
}

double x_nullcline_voltage(StateFraction x, const ModelCoefficients& c) {
  const double xx = x.x();
  return std::sqrt(-c.C / (c.A * (1.0 + c.B * xx * xx) * x.log()));
}

double v_nullcline_voltage(StateFraction x, const CircuitParams& cp, const ModelCoefficients& c) {
  const double xx = x.x();
  return cp.Vdc / (1.0 + cp.Rs * c.A * (1.0 + c.B * xx * xx));
}

namespace {

const std::vector<StateFraction>& fp_grid() {
  static const std::vector<StateFraction> g = default_x_grid(4000, 1e-12);
  return g;
}

}  // namespace

std::vector<CircuitOperatingPoint> circuit_fixed_points(const CircuitParams& cp,
                                                        const ModelCoefficients& c) {
  cp.validate();
  auto h = [&](double u) {
    const auto s = StateFraction::from_log(u);
    return x_nullcline_voltage(s, c) - v_nullcline_voltage(s, cp, c);
  };
  // at low bias the lone fixed point sits far below x = 1e-12; there 1 + B x^2 = 1,
  // so v0 = sqrt(C / (A |ln x|)) meets v1 = Vdc / (1 + Rs A) at |ln x| = u_star
  std::vector<StateFraction> g;
  const double u_top = fp_grid().front().log();
  const double u_star = c.C * std::pow(1.0 + cp.Rs * c.A, 2) / (c.A * cp.Vdc * cp.Vdc);
  if (2.0 * u_star > -u_top) {
    for (double m : num::logspace(2.0 * u_star, -u_top, 400)) g.push_back(StateFraction::from_log(-m));
    g.pop_back();
  }
  g.insert(g.end(), fp_grid().begin(), fp_grid().end());
  std::vector<CircuitOperatingPoint> out;
  double prev = h(g[0].log());
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double cur = h(g[k].log());
    if ((prev > 0) != (cur > 0)) {
      const double u = num::bisect(h, g[k - 1].log(), g[k].log(), 1e-15);
      const auto s = StateFraction::from_log(u);
      out.push_back(jacobian(s, v_nullcline_voltage(s, cp, c), cp, c));
    }
    prev = cur;
  }
  return out;
}

std::vector<Tangency> nullcline_tangencies(double Rs, const ModelCoefficients& c) {
  // bias that puts a fixed point at x: v0(x) + Rs i_Q(x)
  auto vreq = [&](double u) {
    const auto s = StateFraction::from_log(u);
    const double v = x_nullcline_voltage(s, c);
    return v * (1.0 + Rs / memristance(s, c));
  };
  const auto& g = fp_grid();
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) f[k] = vreq(g[k].log());
  std::vector<Tangency> out;
  for (std::size_t k = 1; k + 1 < g.size(); ++k) {
    const bool mx = f[k] > f[k - 1] && f[k] >= f[k + 1];
    const bool mn = f[k] < f[k - 1] && f[k] <= f[k + 1];
    if (!mx && !mn) continue;
    const double a = g[k - 1].log(), b = g[k + 1].log();
    const auto r = mx ? num::golden_max(vreq, a, b, 1e-14) : num::golden_min(vreq, a, b, 1e-14);
    const auto s = StateFraction::from_log(r.first);
    out.push_back({r.second, s, x_nullcline_voltage(s, c)});
  }
  return out;
}

NullclineSet nullclines(const CircuitParams& cp, const ModelCoefficients& c,
                        const std::vector<StateFraction>& grid) {
  cp.validate();
  NullclineSet ns;
  for (const auto& s : grid) {
    ns.x_nullcline.emplace_back(s.x(), x_nullcline_voltage(s, c));
    ns.v_nullcline.emplace_back(s.x(), v_nullcline_voltage(s, cp, c));
  }
  ns.fixed_points = circuit_fixed_points(cp, c);

  // Both nullclines are graphs over x, so the open regions are: above both,
  // below both, and one wedge between them per interval between crossings.
  const std::size_t nfp = ns.fixed_points.size();
  std::vector<double> cuts;  // ln x of the crossings
  for (const auto& op : ns.fixed_points) cuts.push_back(op.x_Q.log());
  auto sgn = [](double v) { return (v > 0) - (v < 0); };
  auto region_of = [&](const StateFraction& s, double v) -> std::size_t {
    const double v0 = x_nullcline_voltage(s, c), v1 = v_nullcline_voltage(s, cp, c);
    if (v > std::max(v0, v1)) return 0;
    if (v < std::min(v0, v1)) return 1;
    return 2 + static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), s.log()) - cuts.begin());
  };
  ns.region_signs.assign(nfp + 3, PhaseRegion{});
  auto label = [&](std::size_t id, const StateFraction& s, double v) {
    const auto d = circuit_rhs(s, v, cp, c);
    auto& r = ns.region_signs[id];
    r.sign_dx = sgn(d[0]);
    r.sign_dv = sgn(d[1]);
    r.x = s.x();
    r.v = v;
  };
  // representatives: wedge midpoints in ln x, halfway between the curves
  const double u_lo = std::min(std::log(1e-6), cuts.empty() ? 0.0 : cuts.front() - 1.0);
  const double u_hi = std::log1p(-1e-6);
  for (std::size_t w = 0; w <= nfp; ++w) {
    const double a = w == 0 ? u_lo : cuts[w - 1];
    const double b = w == nfp ? u_hi : cuts[w];
    const auto s = StateFraction::from_log(0.5 * (a + b));
    label(2 + w, s, 0.5 * (x_nullcline_voltage(s, c) + v_nullcline_voltage(s, cp, c)));
  }
  {
    const auto s = StateFraction(0.5);
    const double v0 = x_nullcline_voltage(s, c), v1 = v_nullcline_voltage(s, cp, c);
    label(0, s, 1.5 * std::max(v0, v1));
    label(1, s, 0.5 * std::min(v0, v1));
  }
  // approximate areas on a (ln x, v) lattice over the plotted window
  const auto cols = default_x_grid(400, 1e-6);
  double vtop = cp.Vdc;
  for (const auto& s : cols)
    if (s.x() < 0.5) vtop = std::max(vtop, x_nullcline_voltage(s, c));
  vtop *= 1.25;
  const std::size_t nr = 400;
  for (const auto& s : cols)
    for (std::size_t r = 0; r < nr; ++r)
      ++ns.region_signs[region_of(s, vtop * (static_cast<double>(r) + 0.5) / nr)].cells;
  return ns;
}

CircuitOperatingPoint tracked_fixed_point(const CircuitParams& cp, const ModelCoefficients& c,
                                          double ln_x_hint) {
  const auto fps = circuit_fixed_points(cp, c);
  if (fps.empty()) throw solver_error("no circuit fixed point found");
  std::size_t best = 0;
  for (std::size_t k = 1; k < fps.size(); ++k)
    if (std::abs(fps[k].x_Q.log() - ln_x_hint) < std::abs(fps[best].x_Q.log() - ln_x_hint))
      best = k;
  return fps[best];
}

double critical_parameter(CircuitParam which, const CircuitParams& fixed, double lo, double hi,
                          const ModelCoefficients& c, double rel_tol) {
  if (!(lo > 0) || !(hi > lo)) throw invalid_parameter("critical search needs 0 < lo < hi");
  CircuitParams p = fixed;
  set(p, which, lo);
  // follow the branch with the largest x at the lower end
  const auto start = circuit_fixed_points(p, c);
  if (start.empty()) throw solver_error("no circuit fixed point at the lower bracket");
  double hint = start.back().x_Q.log();
  auto tr_at = [&](double value) {
    set(p, which, value);
    const auto op = tracked_fixed_point(p, c, hint);
    hint = op.x_Q.log();
    return op.tr;
  };
  const bool logscale = which == CircuitParam::Cp;
  double a = lo, b = hi;
  const double ta = tr_at(a), tb = tr_at(b);
  if ((ta > 0) == (tb > 0)) throw solver_error("trace does not change sign inside the bracket");
  const bool a_pos = ta > 0;
  for (int it = 0; it < 300 && (b - a) > rel_tol * b; ++it) {
    const double m = logscale ? std::sqrt(a * b) : 0.5 * (a + b);
    ((tr_at(m) > 0) == a_pos ? a : b) = m;
  }
  return 0.5 * (a + b);
}

double cp_star_closed_form(const CircuitOperatingPoint& op, double Rs) {
  return -(1.0 + op.gammas) / (Rs * op.omega1 * (1.0 + op.gamma1));
}

PowerLaw cp_star_power_law(const std::vector<double>& rs_list, double Vdc,
                           const ModelCoefficients& c) {
  if (rs_list.size() < 3) throw invalid_parameter("power law needs at least 3 Rs values");
  PowerLaw pl;
  std::vector<double> lx, ly;
  for (double rs : rs_list) {
    const double cs = critical_parameter(CircuitParam::Cp, {rs, 1e-12, Vdc}, 1e-18, 1e-6, c);
    pl.rs.push_back(rs);
    pl.cp_star.push_back(cs);
    lx.push_back(std::log(rs));
    ly.push_back(std::log(cs));
  }
  const auto fit = num::linear_fit(lx, ly);
  pl.b = fit.slope;
  pl.a = std::exp(fit.intercept);
  pl.r2 = fit.r2;
  return pl;
}

namespace {

double max_re(const CircuitOperatingPoint& op) {
  return std::max(op.eigs[0].real(), op.eigs[1].real());
}

}  // namespace

HopfReport hopf_conditions(CircuitParam which, const CircuitParams& at, const ModelCoefficients& c) {
  HopfReport r;
  r.value = get(at, which);
  const auto fps = circuit_fixed_points(at, c);
  if (fps.empty()) throw solver_error("no circuit fixed point at the critical value");
  const double hint = fps.back().x_Q.log();
  const auto op = fps.back();
  r.re_lambda = max_re(op);
  r.beta = std::abs(op.eigs[0].imag());
  r.nonhyperbolic = r.beta > 0 && std::abs(r.re_lambda) <= 1e-6 * r.beta;

  const double h = 1e-3 * r.value;
  CircuitParams p = at;
  set(p, which, r.value + h);
  const double up = max_re(tracked_fixed_point(p, c, hint));
  set(p, which, r.value - h);
  const double dn = max_re(tracked_fixed_point(p, c, hint));
  r.d = (up - dn) / (2.0 * h);
  return r;
}

std::vector<TrDetSweepPoint> trdet_sweep(CircuitParam which, const std::vector<double>& values,
                                         const CircuitParams& base, const ModelCoefficients& c,
                                         unsigned jobs) {
  auto per_value = num::parallel_map<std::vector<CircuitOperatingPoint>>(
      values.size(), jobs, [&](std::size_t k) {
        CircuitParams p = base;
        set(p, which, values[k]);
        return circuit_fixed_points(p, c);
      });

  // sequential branch assembly: nearest-x continuation, new branch beyond 0.05
  std::vector<TrDetSweepPoint> out;
  std::vector<std::pair<int, double>> live;  // (branch id, last x)
  int next_id = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::vector<std::pair<int, double>> now;
    std::vector<bool> taken(live.size(), false);
    for (const auto& op : per_value[k]) {
      int id = -1;
      double best = 0.05;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < live.size(); ++j) {
        const double d = std::abs(live[j].second - op.x_Q.x());
        if (!taken[j] && d <= best) {
          best = d;
          id = live[j].first;
          best_j = j;
        }
      }
      if (id < 0) {
        id = next_id++;
      } else {
        taken[best_j] = true;
      }
      now.emplace_back(id, op.x_Q.x());
      out.push_back({values[k], id, op});
    }
    live = std::move(now);
  }
  return out;
}

}  // namespace mott
