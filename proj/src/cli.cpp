#include "mott/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mott/config.hpp"
#include "mott/dynamics.hpp"
#include "mott/numerics.hpp"
#include "mott/pa_circuit.hpp"
#include "mott/small_signal.hpp"
#include "mott/steady_state.hpp"
#include "mott/svg.hpp"

namespace mott {

namespace {

using ojson = nlohmann::ordered_json;

struct Globals {
  std::string device = "default";
  std::optional<std::string> config;
  std::optional<std::string> out_dir;
  std::optional<std::string> out;
  std::string format;
  unsigned jobs = 0;
};

// circuit flags shared by the oscillator subcommands
struct CircuitFlags {
  std::optional<double> rs, cp, vdc;
  void add(CLI::App* sc) {
    sc->add_option("--rs", rs, "series resistance Rs (Ohm)");
    sc->add_option("--cp", cp, "parallel capacitance Cp (F)");
    sc->add_option("--vdc", vdc, "bias voltage Vdc (V)");
  }
  CircuitParams apply(CircuitParams p) const {
    if (rs) p.Rs = *rs;
    if (cp) p.Cp = *cp;
    if (vdc) p.Vdc = *vdc;
    p.validate();
    return p;
  }
};

ojson device_json(const DeviceParams& p) {
  ojson j;
  j["c_p"] = json_number(p.c_p);
  j["dh_tr"] = json_number(p.dh_tr);
  j["kappa"] = json_number(p.kappa);
  j["rho_met"] = json_number(p.rho_met);
  j["rho_ins"] = json_number(p.rho_ins);
  j["dT"] = json_number(p.dT);
  j["r_ch"] = json_number(p.r_ch);
  j["L_ch"] = json_number(p.L_ch);
  return j;
}

ojson circuit_json(const CircuitParams& p) {
  return ojson{{"Rs_ohm", json_number(p.Rs)}, {"Cp_F", json_number(p.Cp)}, {"Vdc_V", json_number(p.Vdc)}};
}

ojson op_json(const CircuitOperatingPoint& op) {
  ojson j;
  j["x_q"] = json_number(op.x_Q.x());
  j["v_q"] = json_number(op.v_Q);
  j["class_id"] = op.trdet.id;
  j["class_name"] = op.trdet.name;
  j["linearization_unreliable"] = op.trdet.borderline;
  j["tr"] = json_number(op.tr);
  j["det"] = json_number(op.det);
  j["eig_re"] = {json_number(op.eigs[0].real()), json_number(op.eigs[1].real())};
  j["eig_im"] = {json_number(op.eigs[0].imag()), json_number(op.eigs[1].imag())};
  return j;
}

ojson cycle_json(const CycleReport& r) {
  ojson j;
  j["verdict"] = to_string(r.verdict);
  j["swing_V"] = json_number(r.swing);
  j["t_transient_s"] = json_number(r.t_transient);
  if (r.verdict == CycleVerdict::limit_cycle) {
    j["T_lc_s"] = json_number(r.lc.T_lc);
    j["T_lc_x_s"] = json_number(r.lc.T_lc_x);
    j["period_rel_std"] = json_number(r.lc.period_rel_std);
    j["n_periods"] = r.lc.n_periods_used;
    j["x_min"] = json_number(r.lc.x_min);
    j["x_max"] = json_number(r.lc.x_max);
    j["v_min_V"] = json_number(r.lc.v_min);
    j["v_max_V"] = json_number(r.lc.v_max);
  } else {
    j["x_final"] = json_number(r.x_fp);
    j["v_final_V"] = json_number(r.v_fp);
  }
  return j;
}

std::vector<double> sweep_values(double from, double to, std::size_t steps) {
  if (steps < 2) throw invalid_parameter("--steps must be at least 2");
  if (!(to > from)) throw invalid_parameter("--to must exceed --from");
  return num::linspace(from, to, steps);
}

struct Ctx {
  Globals g;
  RunConfig cfg;
  ModelCoefficients coeffs{};
  std::set<std::string> formats;
  bool want_svg() const { return formats.count("svg") > 0; }
};

void emit(const ResultBundle& b, const Ctx& ctx, std::ostream& out) {
  if (ctx.g.out) {
    std::ofstream f(*ctx.g.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + *ctx.g.out);
    const bool json_only = ctx.formats.count("json") && !ctx.formats.count("csv");
    if (!b.tables.empty() && !json_only) {
      write_csv(b.tables.front(), f);
    } else {
      ojson j{{"command", b.command}, {"input", b.input}, {"result", b.summary}};
      f << j.dump(2) << '\n';
    }
  }
  const std::string dir = ctx.g.out_dir ? *ctx.g.out_dir : ctx.cfg.output.dir;
  if (!dir.empty()) write_bundle(b, dir, ctx.formats);
  if (ctx.g.out || !dir.empty()) {
    if (!b.summary.is_null()) out << b.summary.dump(2) << '\n';
    return;
  }
  if (!b.summary.is_null())
    out << b.summary.dump(2) << '\n';
  else if (!b.tables.empty())
    write_csv(b.tables.front(), out);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                ResultBundle* bundle_out) {
  CLI::App app{"VO2 Mott memristor compact model and oscillator analysis"};
  app.name(args.empty() ? "mott" : args.front());
  app.require_subcommand(1);
  app.fallthrough();

  Ctx ctx;
  auto& g = ctx.g;
  app.add_option("--device", g.device, "built-in device: default | 10x10 | 36x50 | 56x100 (nm radius x length)");
  app.add_option("--config", g.config, "config file with [device] [circuit] [grids] [output] sections");
  app.add_option("--out-dir", g.out_dir, "directory for CSV/JSON/SVG outputs");
  app.add_option("--out", g.out, "write the primary table (or JSON result) to this file");
  app.add_option("--format", g.format, "comma list of csv,json,svg (default csv,json)");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps (default: all cores)");

  ResultBundle b;
  std::function<void()> action;
  auto sub = [&](const char* name, const char* help) {
    auto* sc = app.add_subcommand(name, help);
    b.command = name;
    return sc;
  };
  auto table = [](std::string name, std::vector<std::string> cols) {
    Table t;
    t.name = std::move(name);
    t.columns = std::move(cols);
    return t;
  };

  // ---- model-core ----
  std::size_t n_points = 2000;
  auto* pop = sub("pop", "power-off plot f_x(x, i=0) over x (columns: x, f_x_per_s)");
  pop->add_option("--points", n_points, "number of x samples");
  pop->callback([&] {
    action = [&] {
      b.command = "pop";
      auto t = table("pop", {"x", "f_x_per_s"});
      for (const auto& s : default_x_grid(n_points, 1e-12))
        t.add({s.x(), kinetic_current(s, 0.0, ctx.coeffs)});
      b.tables.push_back(std::move(t));
      if (ctx.want_svg()) b.figures["pop"] = render_figure(b.tables, FigureKind::route, "power-off plot");
    };
  });

  std::vector<double> route_v, route_i;
  auto* dr = sub("dynamic-route", "dynamic routes f_x(x, v0) or f_x(x, i0) (columns: bias, x, f_x_per_s)");
  dr->add_option("--v", route_v, "bias voltages (V), repeatable");
  dr->add_option("--i", route_i, "bias currents (A), repeatable");
  dr->add_option("--points", n_points, "number of x samples");
  dr->callback([&] {
    action = [&] {
      b.command = "dynamic-route";
      if (route_v.empty() && route_i.empty()) throw CLI::ValidationError("dynamic-route", "give --v or --i");
      auto t = table("dynamic-route", {"bias", "kind", "x", "f_x_per_s"});
      const auto grid = default_x_grid(n_points, 1e-12);
      for (double v : route_v)
        for (const auto& s : grid) t.add({v, std::string("V"), s.x(), kinetic_voltage(s, v, ctx.coeffs)});
      for (double i : route_i)
        for (const auto& s : grid) t.add({i, std::string("A"), s.x(), kinetic_current(s, i, ctx.coeffs)});
      ojson roots = ojson::array();
      for (double v : route_v) {
        ojson r{{"v0_V", json_number(v)}, {"roots", ojson::array()}};
        for (const auto& q : fixed_points_const_voltage(v, ctx.coeffs))
          r["roots"].push_back({{"x", json_number(q.x.x())}, {"stability", to_string(q.stability)}});
        roots.push_back(r);
      }
      if (!route_v.empty()) b.summary = ojson{{"voltage_roots", roots}};
      b.tables.push_back(std::move(t));
      if (ctx.want_svg()) b.figures["dynamic-route"] = render_figure(b.tables, FigureKind::route, "dynamic routes");
    };
  });

  // ---- steady-state ----
  auto* dcl = sub("dc-locus", "steady-state locus (columns: x_q, i_q_A, v_q_V, r_ch_ohm)");
  dcl->callback([&] {
    action = [&] {
      b.command = "dc-locus";
      const auto L = dc_locus(default_x_grid(ctx.cfg.grids.x_points), ctx.coeffs);
      auto t = table("dc-locus", {"x_q", "i_q_A", "v_q_V", "r_ch_ohm"});
      for (const auto& q : L.points) t.add({q.x_Q.x(), q.i_Q, q.v_Q, q.r_Q});
      b.summary = {{"i_c1_A", json_number(L.i_c1)},
                   {"i_c2_A", json_number(L.i_c2)},
                   {"peak", {{"x_q", json_number(L.peak.x_Q.x())}, {"v_q_V", json_number(L.peak.v_Q)}}},
                   {"trough", {{"x_q", json_number(L.trough.x_Q.x())}, {"v_q_V", json_number(L.trough.v_Q)}}}};
      b.tables.push_back(std::move(t));
      if (ctx.want_svg()) b.figures["dc-locus"] = render_figure(b.tables, FigureKind::dc_locus, "DC locus");
    };
  });

  auto* sn = sub("saddle-node", "saddle-node bias voltage under constant-voltage drive (JSON)");
  sn->callback([&] {
    action = [&] {
      b.command = "saddle-node";
      const auto r = saddle_node_voltage(ctx.coeffs);
      ojson roots = ojson::array();
      for (const auto& q : r.root_pairs)
        roots.push_back({{"x", json_number(q.x.x())}, {"stability", to_string(q.stability)}});
      b.summary = {{"v_star_V", json_number(r.v_star)},
                   {"roots", roots},
                   {"roots_below", r.roots_below},
                   {"roots_at", r.roots_at},
                   {"roots_above", r.roots_above}};
    };
  });

  // ---- small-signal ----
  double iq = 10e-6;
  auto* lin = sub("linearize", "linear coefficients, virtual elements and pole/zero at a DC current (JSON)");
  lin->add_option("--iq", iq, "DC bias current i_Q (A)")->required();
  lin->callback([&] {
    action = [&] {
      b.command = "linearize";
      const auto q = fixed_point_at_current(iq, ctx.coeffs);
      const auto lc = linearize(q, ctx.coeffs);
      const auto ve = virtual_elements(lc);
      const auto k = impedance_coeffs(ve);
      const auto pz = pole_zero(q, ctx.coeffs);
      const auto wm = max_active_frequency(q, ctx.coeffs);
      b.summary = {{"x_q", json_number(q.x_Q.x())}, {"i_q_A", json_number(q.i_Q)}, {"v_q_V", json_number(q.v_Q)},
                   {"a11_V", json_number(lc.a11)}, {"a12_ohm", json_number(lc.a12)},
                   {"b11_per_s", json_number(lc.b11)}, {"b12_per_sA", json_number(lc.b12)},
                   {"R1_ohm", json_number(ve.R1)}, {"R2_ohm", json_number(ve.R2)}, {"C1_F", json_number(ve.C1)},
                   {"a0", json_number(k.a0)}, {"a1_s", json_number(k.a1)}, {"b0_ohm", json_number(k.b0)},
                   {"b1_ohm_s", json_number(k.b1)},
                   {"pole_per_s", json_number(pz.p)}, {"zero_per_s", json_number(pz.z)}, {"gain_ohm", json_number(pz.k)},
                   {"activity_class", to_string(pz.activity_class)},
                   {"f_max_Hz", wm ? json_number(*wm / (2 * std::numbers::pi)) : ojson(nullptr)},
                   {"f_p_Hz", json_number(imz_peak_frequency(q, ctx.coeffs))}};
    };
  });

  bool pz_sweep = false;
  auto* pzc = sub("pole-zero", "pole, zero and activity class (single --iq or --sweep over the current grid)");
  pzc->add_option("--iq", iq, "DC bias current i_Q (A)");
  pzc->add_flag("--sweep", pz_sweep, "sweep the [grids] current range");
  pzc->callback([&] {
    action = [&] {
      b.command = "pole-zero";
      auto t = table("pole-zero", {"i_q_A", "x_q", "v_q_V", "pole_per_s", "zero_per_s", "gain_ohm", "class"});
      std::vector<double> is{iq};
      if (pz_sweep) is = num::logspace(ctx.cfg.grids.i_min, ctx.cfg.grids.i_max, ctx.cfg.grids.i_points);
      for (double i : is) {
        const auto q = fixed_point_at_current(i, ctx.coeffs);
        const auto pz = pole_zero(q, ctx.coeffs);
        t.add({q.i_Q, q.x_Q.x(), q.v_Q, pz.p, pz.z, pz.k, to_string(pz.activity_class)});
      }
      b.tables.push_back(std::move(t));
    };
  });

  auto* nyq = sub("nyquist", "impedance locus Z(i 2 pi f) at a DC current (columns: f_Hz, omega_rad_s, re_ohm, im_ohm)");
  nyq->add_option("--iq", iq, "DC bias current i_Q (A)")->required();
  nyq->callback([&] {
    action = [&] {
      b.command = "nyquist";
      const auto q = fixed_point_at_current(iq, ctx.coeffs);
      const auto fs = num::logspace(ctx.cfg.grids.f_min, ctx.cfg.grids.f_max, ctx.cfg.grids.f_points);
      auto t = table("nyquist", {"f_Hz", "omega_rad_s", "re_ohm", "im_ohm"});
      std::vector<double> fz{0.0};
      fz.insert(fz.end(), fs.begin(), fs.end());
      const auto ve = virtual_elements(linearize(q, ctx.coeffs));
      const auto k = impedance_coeffs(ve);
      for (double f : fz) {
        const auto s = impedance(ve, 2 * std::numbers::pi * f);
        t.add({f, s.omega, s.re, s.im});
      }
      b.summary = {{"i_q_A", json_number(q.i_Q)},
                   {"z_at_zero_ohm", json_number(k.b0 / k.a0)},
                   {"z_at_infinity_ohm", json_number(k.b1 / k.a1)}};
      b.tables.push_back(std::move(t));
      if (ctx.want_svg()) b.figures["nyquist"] = render_figure(b.tables, FigureKind::nyquist, "Nyquist locus");
    };
  });

  auto* rz = sub("rez-map", "Re Z(i_Q, f) map and its zero contour (columns: i_A, f_Hz, re_ohm)");
  rz->callback([&] {
    action = [&] {
      b.command = "rez-map";
      const auto& gc = ctx.cfg.grids;
      const auto m = rez_map(num::logspace(gc.i_min, gc.i_max, gc.i_points),
                             num::logspace(gc.f_min, gc.f_max, gc.f_points), ctx.coeffs, g.jobs);
      auto t = table("rez-map", {"i_A", "f_Hz", "re_ohm"});
      for (std::size_t ii = 0; ii < m.i_grid.size(); ++ii)
        for (std::size_t jf = 0; jf < m.f_grid.size(); ++jf) t.add({m.i_grid[ii], m.f_grid[jf], m.at(ii, jf)});
      auto ct = table("contour", {"i0_A", "f0_Hz", "i1_A", "f1_Hz"});
      for (const auto& s : m.contour) ct.add({s.i0, s.f0, s.i1, s.f1});
      const auto apex = eoc_apex(ctx.coeffs);
      b.summary = {{"grid_apex", {{"i_A", json_number(m.apex_i)}, {"f_Hz", json_number(m.apex_f)}}},
                   {"refined_apex", {{"i_A", json_number(apex.q.i_Q)}, {"x_q", json_number(apex.q.x_Q.x())},
                                     {"f_max_Hz", json_number(apex.f_max)}}}};
      b.tables.push_back(std::move(t));
      b.tables.push_back(std::move(ct));
      if (ctx.want_svg()) b.figures["rez-map"] = render_figure(b.tables, FigureKind::rez_map, "Re Z(i_Q, f)");
    };
  });

  std::vector<double> radii;
  auto* sc = sub("scaling", "EOC apex versus channel radius (columns: r_ch_m, f_max_Hz, i_q_A, x_q)");
  sc->add_option("--radii", radii, "channel radii (m), default 5..60 nm in 5 nm steps");
  sc->callback([&] {
    action = [&] {
      b.command = "scaling";
      if (radii.empty())
        for (int r = 5; r <= 60; r += 5) radii.push_back(r * 1e-9);
      const auto s = scaling_study(radii, ctx.cfg.device, g.jobs);
      auto t = table("scaling", {"r_ch_m", "f_max_Hz", "i_q_A", "x_q"});
      for (const auto& r : s.rows) t.add({r.r_ch, r.f_max, r.i_at_apex, r.x_at_apex});
      b.summary = {{"slope_A_per_m", json_number(s.slope)}, {"intercept_A", json_number(s.intercept)},
                   {"r2", json_number(s.r2)}};
      b.tables.push_back(std::move(t));
    };
  });

  // ---- pa-circuit ----
  CircuitFlags cf;
  auto* pfp = sub("pa-fixed-points", "oscillator fixed points with tr-det classification (JSON)");
  cf.add(pfp);
  pfp->callback([&] {
    action = [&] {
      b.command = "pa-fixed-points";
      const auto cp = cf.apply(ctx.cfg.circuit);
      b.input["circuit"] = circuit_json(cp);
      ojson arr = ojson::array();
      for (const auto& op : circuit_fixed_points(cp, ctx.coeffs)) arr.push_back(op_json(op));
      b.summary = {{"fixed_points", arr}};
    };
  });

  std::string vary = "rs";
  std::optional<double> from, to;
  std::optional<std::size_t> steps;
  auto* sweep = sub("pa-trdet-sweep", "tr-det locus while one circuit parameter varies (CSV per branch)");
  cf.add(sweep);
  sweep->add_option("--vary", vary, "rs | cp | vdc");
  sweep->add_option("--from", from, "start value (SI units of the varied parameter)");
  sweep->add_option("--to", to, "end value (SI units)");
  sweep->add_option("--steps", steps, "number of values");
  sweep->callback([&] {
    action = [&] {
      b.command = "pa-trdet-sweep";
      const auto which = parse_circuit_param(vary);
      const auto cp = cf.apply(ctx.cfg.circuit);
      const double a = from ? *from : ctx.cfg.grids.param_from.value_or(get(cp, which) * 0.5);
      const double z = to ? *to : ctx.cfg.grids.param_to.value_or(get(cp, which) * 1.5);
      const auto pts = trdet_sweep(which, sweep_values(a, z, steps.value_or(ctx.cfg.grids.param_steps)), cp,
                                   ctx.coeffs, g.jobs);
      auto t = table("pa-trdet-sweep", {"value", "branch", "x_q", "v_q", "tr", "det", "class_id", "class_name",
                                        "eig_re", "eig_im"});
      for (const auto& p : pts)
        t.add({p.value, static_cast<double>(p.branch), p.op.x_Q.x(), p.op.v_Q, p.op.tr, p.op.det,
               static_cast<double>(p.op.trdet.id), p.op.trdet.name, p.op.eigs[0].real(), p.op.eigs[0].imag()});
      b.input["vary"] = vary;
      b.tables.push_back(std::move(t));
      if (ctx.want_svg()) b.figures["pa-trdet-sweep"] = render_figure(b.tables, FigureKind::trdet, "tr-det locus");
    };
  });

  auto* crit = sub("pa-critical", "critical Rs, Cp or Vdc where tr = 0, with Hopf checks (JSON)");
  cf.add(crit);
  crit->add_option("--vary", vary, "rs | cp | vdc")->required();
  crit->add_option("--from", from, "bracket start (SI units)");
  crit->add_option("--to", to, "bracket end (SI units)");
  crit->callback([&] {
    action = [&] {
      b.command = "pa-critical";
      const auto which = parse_circuit_param(vary);
      const auto cp = cf.apply(ctx.cfg.circuit);
      double lo = 0, hi = 0;
      switch (which) {
        case CircuitParam::Rs: lo = 3000; hi = 3700; break;
        case CircuitParam::Cp: lo = 1e-18; hi = 1e-6; break;
        case CircuitParam::Vdc: lo = 1.1; hi = 1.3; break;
      }
      if (from) lo = *from;
      if (to) hi = *to;
      const double v = critical_parameter(which, cp, lo, hi, ctx.coeffs);
      CircuitParams at = cp;
      set(at, which, v);
      const auto h = hopf_conditions(which, at, ctx.coeffs);
      b.input["vary"] = vary;
      b.input["circuit"] = circuit_json(cp);
      b.summary = {{"param", vary},
                   {"critical_value", json_number(v)},
                   {"nonhyperbolic", h.nonhyperbolic},
                   {"beta_rad_s", json_number(h.beta)},
                   {"d_re_lambda", json_number(h.d)}};
    };
  });

  auto* nc = sub("nullclines", "x- and v-nullclines, fixed points and region signs");
  cf.add(nc);
  nc->callback([&] {
    action = [&] {
      b.command = "nullclines";
      const auto cp = cf.apply(ctx.cfg.circuit);
      const auto grid = default_x_grid(800, 1e-6);
      const auto ns = nullclines(cp, ctx.coeffs, grid);
      auto t = table("nullclines", {"x", "v0_V", "v1_V"});
      for (std::size_t k = 0; k < grid.size(); ++k)
        t.add({ns.x_nullcline[k].first, ns.x_nullcline[k].second, ns.v_nullcline[k].second});
      auto fp = table("fixed-points", {"x_q", "v_q", "class_id", "class_name", "tr", "det"});
      ojson arr = ojson::array();
      for (const auto& op : ns.fixed_points) {
        fp.add({op.x_Q.x(), op.v_Q, static_cast<double>(op.trdet.id), op.trdet.name, op.tr, op.det});
        arr.push_back(op_json(op));
      }
      ojson regions = ojson::array();
      for (const auto& r : ns.region_signs)
        regions.push_back({{"sign_dx", r.sign_dx}, {"sign_dv", r.sign_dv}, {"cells", r.cells},
                           {"x", json_number(r.x)}, {"v_V", json_number(r.v)}});
      b.input["circuit"] = circuit_json(cp);
      b.summary = {{"fixed_points", arr}, {"regions", regions}};
      // direction field on a coarse sub-grid
      auto field = table("field", {"x", "v_V", "dx_dt", "dv_dt"});
      double vtop = cp.Vdc;
      for (const auto& p : ns.x_nullcline) vtop = std::max(vtop, p.second);
      for (const auto& s : default_x_grid(24, 1e-6))
        for (double v : num::linspace(0.02 * vtop, vtop, 18)) {
          const auto d = circuit_rhs(s, v, cp, ctx.coeffs);
          field.add({s.x(), v, d[0], d[1]});
        }
      b.tables.push_back(std::move(t));
      b.tables.push_back(std::move(fp));
      b.tables.push_back(std::move(field));
      if (ctx.want_svg())
        b.figures["nullclines"] = render_figure({b.tables[0], b.tables[2], b.tables[1]}, FigureKind::nullclines,
                                                "nullclines and direction field");
    };
  });

  // ---- dynamics ----
  double x0 = 0.1, v0 = 0.39, horizon = 1e-6;
  auto* sim = sub("simulate", "integrate the oscillator (columns: t_s, x, v_V)");
  cf.add(sim);
  sim->add_option("--x0", x0, "initial metallic fraction");
  sim->add_option("--v0", v0, "initial capacitor voltage (V)");
  sim->add_option("--horizon", horizon, "integration time (s)");
  sim->callback([&] {
    action = [&] {
      b.command = "simulate";
      const auto cp = cf.apply(ctx.cfg.circuit);
      auto tr = integrate({x0, v0}, cp, ctx.coeffs, horizon, default_options(cp));
      const auto rep = detect_limit_cycle(tr, cp);
      if (tr.status != TrajectoryStatus::clamped) {
        if (rep.verdict == CycleVerdict::limit_cycle) tr.status = TrajectoryStatus::periodic;
        if (rep.verdict == CycleVerdict::fixed_point) tr.status = TrajectoryStatus::converged_fixed_point;
      }
      auto t = table("simulate", {"t_s", "x", "v_V"});
      for (std::size_t k = 0; k < tr.t.size(); ++k) t.add({tr.t[k], tr.x(k), tr.v[k]});
      b.input["circuit"] = circuit_json(cp);
      b.input["ic"] = {json_number(x0), json_number(v0)};
      b.input["horizon_s"] = json_number(horizon);
      b.summary = cycle_json(rep);
      b.summary["status"] = to_string(tr.status);
      b.summary["accepted_steps"] = tr.accepted;
      b.summary["rejected_steps"] = tr.rejected;
      b.tables.push_back(std::move(t));
      if (ctx.want_svg()) b.figures["simulate"] = render_figure(b.tables, FigureKind::time_series, "v(t)");
    };
  });

  std::string grid_spec = "18x18";
  auto* por = sub("portrait", "phase portrait from an initial-condition grid (columns per orbit)");
  cf.add(por);
  por->add_option("--grid", grid_spec, "NxM initial conditions over x0 0.05-0.95, v0 0.06-1.14 V");
  por->add_option("--horizon", horizon, "integration time per orbit (s)");
  por->callback([&] {
    action = [&] {
      b.command = "portrait";
      const auto cp = cf.apply(ctx.cfg.circuit);
      std::size_t nx = 0, nv = 0;
      char sep = 0;
      std::istringstream gs(grid_spec);
      if (!(gs >> nx >> sep >> nv) || sep != 'x' || nx == 0 || nv == 0)
        throw CLI::ValidationError("--grid", "expected NxM");
      const auto ics = ic_grid(nx, nv);
      const auto p = phase_portrait(ics, cp, ctx.coeffs, horizon, g.jobs);
      auto t = table("portrait", {"x0", "v0_V", "verdict", "T_lc_s", "x_min", "x_max", "v_min_V", "v_max_V",
                                  "x_final", "v_final_V", "winding_turns"});
      auto poly = table("cycles", {"orbit", "x", "v_V"});
      for (std::size_t k = 0; k < p.orbits.size(); ++k) {
        const auto& o = p.orbits[k];
        const auto& r = o.report;
        t.add({o.x0, o.v0, to_string(r.verdict), r.lc.T_lc, r.lc.x_min, r.lc.x_max, r.lc.v_min, r.lc.v_max,
               r.x_fp, r.v_fp, o.winding});
        for (const auto& s : r.lc.cycle) poly.add({static_cast<double>(k), s[1], s[2]});
      }
      b.input["circuit"] = circuit_json(cp);
      b.summary = {{"orbits", p.orbits.size()}, {"limit_cycle", p.n_cycle}, {"fixed_point", p.n_fixed},
                   {"inconclusive", p.n_inconclusive}, {"period_min_s", json_number(p.period_min)},
                   {"period_max_s", json_number(p.period_max)}};
      b.tables.push_back(std::move(t));
      b.tables.push_back(std::move(poly));
      if (ctx.want_svg() && !b.tables[1].rows.empty())
        b.figures["portrait"] = render_figure({b.tables[1]}, FigureKind::phase_portrait, "limit cycles");
    };
  });

  bool no_refine = false;
  auto* bif = sub("bif-sweep", "numerical bifurcation diagram over rs | cp | vdc from IC (0.1, 0.39)");
  cf.add(bif);
  bif->add_option("--vary", vary, "rs | cp | vdc")->required();
  bif->add_option("--from", from, "start value (SI units)")->required();
  bif->add_option("--to", to, "end value (SI units)")->required();
  bif->add_option("--steps", steps, "number of grid values");
  bif->add_option("--horizon", horizon, "integration time per point (s); 0 = max(1 us, 200 Rs Cp)");
  bif->add_flag("--no-refine", no_refine, "skip onset bisection");
  bif->callback([&] {
    action = [&] {
      b.command = "bif-sweep";
      const auto which = parse_circuit_param(vary);
      const auto cp = cf.apply(ctx.cfg.circuit);
      SweepOptions so;
      so.horizon = horizon;
      so.refine = !no_refine;
      so.jobs = g.jobs;
      const auto d = bifurcation_sweep(which, sweep_values(*from, *to, steps.value_or(ctx.cfg.grids.param_steps)),
                                       cp, ctx.coeffs, so);
      auto t = table("bif-sweep", {"value", "outcome", "x_min", "x_max", "v_min", "v_max", "T_lc_s",
                                   "x_fp", "v_fp"});
      for (const auto& p : d.points) {
        const auto& r = p.report;
        if (r.verdict == CycleVerdict::limit_cycle)
          t.add({p.value, to_string(r.verdict), r.lc.x_min, r.lc.x_max, r.lc.v_min, r.lc.v_max, r.lc.T_lc,
                 std::nan(""), std::nan("")});
        else
          t.add({p.value, to_string(r.verdict), r.x_fp, r.x_fp, r.v_fp, r.v_fp, 0.0, r.x_fp, r.v_fp});
      }
      ojson onsets = ojson::array();
      for (const auto& o : d.onsets)
        onsets.push_back({{"value", json_number(o.value())}, {"lo", json_number(o.lo)}, {"hi", json_number(o.hi)},
                          {"rising", o.rising}, {"verified_doubled_horizon", o.verified}});
      b.input["vary"] = vary;
      b.input["circuit"] = circuit_json(cp);
      b.summary = {{"onsets", onsets}};
      b.tables.push_back(std::move(t));
      if (ctx.want_svg()) b.figures["bif-sweep"] = render_figure(b.tables, FigureKind::bifurcation, "bifurcation diagram");
    };
  });

  std::vector<char*> argv;
  std::vector<std::string> copy = args.empty() ? std::vector<std::string>{"mott"} : args;
  for (auto& s : copy) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  // bad configuration, presets or format lists are usage errors
  try {
    ctx.cfg = parse_config(g.config, g.device);
    ctx.formats = g.format.empty() ? ctx.cfg.output.formats : parse_formats(g.format);
    ctx.coeffs = derive_coefficients(ctx.cfg.device);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    b.input["device"] = device_json(ctx.cfg.device);
    action();
    emit(b, ctx, out);
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const invalid_parameter& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (bundle_out) *bundle_out = std::move(b);
  return 0;
}

}  // namespace mott
