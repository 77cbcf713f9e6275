#include <doctest.h>

#include <cmath>

#include "mott/dynamics.hpp"

using namespace mott;

namespace {

const ModelCoefficients& dflt() {
  static const auto c = derive_coefficients(default_device());
  return c;
}

CircuitParams circuit(double Rs, double Cp = 1e-12, double Vdc = 1.2) {
  CircuitParams p;
  p.Rs = Rs;
  p.Cp = Cp;
  p.Vdc = Vdc;
  return p;
}

}  // namespace

TEST_CASE("fixed-step global error scales with the fifth power of h") {
  const auto cp = circuit(3200);
  const double T = 2e-9;
  auto final_state = [&](int n) {
    IntegrateOptions o;
    o.fixed_step = T / n;
    const auto tr = integrate({0.3, 0.15}, cp, dflt(), T, o);
    return std::array<double, 2>{tr.lnx.back(), tr.v.back()};
  };
  const auto ref = final_state(8192);
  const auto a = final_state(64);
  const auto b = final_state(128);
  const double e1 = std::abs(a[1] - ref[1]) + std::abs(a[0] - ref[0]);
  const double e2 = std::abs(b[1] - ref[1]) + std::abs(b[0] - ref[0]);
  const double order = std::log2(e1 / e2);
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(order > 4.5);
  CHECK(order < 5.6);
}

TEST_CASE("halving tolerances barely moves the final state") {
  const auto cp = circuit(3200);
  auto opts = default_options(cp);
  const auto a = integrate({0.1, 0.39}, cp, dflt(), 10e-9, opts);
  opts.tol.rtol /= 2;
  opts.tol.atol_lnx /= 2;
  opts.tol.atol_v /= 2;
  const auto b = integrate({0.1, 0.39}, cp, dflt(), 10e-9, opts);
  const Tolerances t;
  CHECK(std::abs(a.v.back() - b.v.back()) < 10 * (t.atol_v + t.rtol * std::abs(a.v.back())));
  CHECK(std::abs(a.lnx.back() - b.lnx.back()) < 10 * (t.atol_lnx + t.rtol * std::abs(a.lnx.back())));
}

TEST_CASE("trajectory invariants") {
  const auto cp = circuit(3400);
  const auto tr = integrate({0.1, 0.39}, cp, dflt(), 200e-9, default_options(cp));
  REQUIRE(tr.t.size() > 100);
  for (std::size_t k = 1; k < tr.t.size(); ++k) {
    CHECK(tr.t[k] > tr.t[k - 1]);
    CHECK(tr.x(k) > 0);
    CHECK(tr.x(k) < 1);
  }
  CHECK(tr.t.back() == doctest::Approx(200e-9).epsilon(1e-12));
  CHECK(tr.accepted > 0);
}

TEST_CASE("damped and oscillating cases") {
  const auto& c = dflt();
  const auto damped = circuit(3200);
  const auto r1 = detect_limit_cycle(integrate({0.1, 0.39}, damped, c, 1e-6, default_options(damped)), damped);
  CHECK(r1.verdict == CycleVerdict::fixed_point);
  CHECK(r1.x_fp == doctest::Approx(0.3178).epsilon(1e-2));
  CHECK(r1.v_fp == doctest::Approx(0.1225).epsilon(1e-2));
  const auto q1 = circuit_fixed_points(damped, c).front();
  CHECK(q1.eigs[0].real() < 0);

  const auto osc = circuit(3400);
  const auto tr = integrate({0.1, 0.39}, osc, c, 1e-6, default_options(osc));
  const auto r2 = detect_limit_cycle(tr, osc);
  REQUIRE(r2.verdict == CycleVerdict::limit_cycle);
  const double ratio = r2.lc.T_lc / (osc.Rs * osc.Cp);
  CHECK(ratio > 2.3);
  CHECK(ratio < 2.7);
  CHECK(r2.lc.T_lc_x == doctest::Approx(r2.lc.T_lc).epsilon(5e-3));
  CHECK(r2.lc.period_rel_std < 5e-3);
  CHECK(r2.lc.x_min < r2.lc.x_max);
  CHECK(r2.lc.v_min < r2.lc.v_max);
  const auto q2 = circuit_fixed_points(osc, c).front();
  CHECK(q2.eigs[0].real() > 0);
  // clockwise in the (x, v) plane
  CHECK(winding_turns(tr, q2.x_Q.x(), q2.v_Q, r2.t_transient) < -10);
}

TEST_CASE("small phase portraits") {
  const auto& c = dflt();
  const auto ics = ic_grid(3, 3);
  REQUIRE(ics.size() == 9);
  const auto p = phase_portrait(ics, circuit(3400), c, 1e-6, 4);
  CHECK(p.n_cycle == 9);
  CHECK(p.period_max / p.period_min - 1 < 1e-2);
  for (const auto& o : p.orbits) CHECK(o.winding < 0);
  const auto d = phase_portrait(ics, circuit(3200), c, 1e-6, 4);
  CHECK(d.n_fixed == 9);
  for (const auto& o : d.orbits) {
    CHECK(o.report.x_fp == doctest::Approx(0.3178).epsilon(1e-2));
    CHECK(o.report.v_fp == doctest::Approx(0.1225).epsilon(1e-2));
  }
}

TEST_CASE("step-size underflow is reported as stiffness") {
  const auto cp = circuit(3400);
  auto o = default_options(cp);
  o.h_min = 1e-11;
  o.tol.rtol = 1e-14;
  o.tol.atol_lnx = 1e-16;
  o.tol.atol_v = 1e-16;
  CHECK_THROWS_AS(integrate({0.1, 0.39}, cp, dflt(), 1e-7, o), stiffness_error);
}

TEST_CASE("coarse bifurcation sweep brackets the onset") {
  SweepOptions so;
  so.refine = false;
  so.jobs = 2;
  const auto d = bifurcation_sweep(CircuitParam::Rs, {3100.0, 3200.0, 3300.0, 3400.0}, circuit(3400), dflt(), so);
  REQUIRE(d.points.size() == 4);
  CHECK(d.points[0].report.verdict == CycleVerdict::fixed_point);
  CHECK(d.points[3].report.verdict == CycleVerdict::limit_cycle);
  REQUIRE(d.onsets.size() == 1);
  CHECK(d.onsets[0].rising);
  CHECK(d.onsets[0].lo >= 3200.0);
  CHECK(d.onsets[0].hi <= 3300.0);
  CHECK(oscillates(d.points[3].report));
  CHECK(default_resolution(CircuitParam::Cp) == 1e-18);
}
