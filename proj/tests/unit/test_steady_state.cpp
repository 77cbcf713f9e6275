#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mott/numerics.hpp"
#include "mott/steady_state.hpp"

using namespace mott;

namespace {
ModelCoefficients coeffs(const char* preset) { return derive_coefficients(device_preset(preset)); }
}  // namespace

TEST_CASE("DC current formula anchors") {
  const auto c = coeffs("default");
  CHECK(dc_current_at_state(StateFraction(0.00567), c) == doctest::Approx(9.076e-6).epsilon(1e-3));
  CHECK(dc_current_at_state(StateFraction(0.60629), c) == doctest::Approx(971.2e-6).epsilon(1e-3));
  CHECK(dc_current_at_state(StateFraction(1 - 1e-12), c) > 1);
}

TEST_CASE("fixed point at a current inverts the DC formula") {
  const auto c = coeffs("default");
  for (double i : {1e-9, 1e-6, 9.077e-6, 1e-4, 1e-3, 5e-3}) {
    const auto q = fixed_point_at_current(i, c);
    CHECK(q.i_Q == doctest::Approx(i).epsilon(1e-10));
    CHECK(dc_current_at_state(q.x_Q, c) == doctest::Approx(i).epsilon(1e-10));
    CHECK(q.v_Q == doctest::Approx(q.r_Q * q.i_Q).epsilon(1e-14));
  }
  CHECK_THROWS_AS(fixed_point_at_current(0.0, c), invalid_parameter);
}

TEST_CASE("locus points are zeros of the kinetic function") {
  const auto c = coeffs("default");
  const auto L = dc_locus(default_x_grid(), c);
  REQUIRE(L.points.size() == 4000);
  for (std::size_t k = 0; k < L.points.size(); k += 7) {
    const auto& q = L.points[k];
    const double f = kinetic_current(q.x_Q, q.i_Q, c);
    const double scale = std::abs(kinetic_current(q.x_Q, 0.0, c));
    CHECK(std::abs(f) <= 1e-9 * scale);
  }
}

TEST_CASE("critical currents for three device sizes") {
  struct Row {
    const char* preset;
    double i1, i2;
  };
  const Row rows[] = {{"10x10", 2.522e-6, 269.77e-6}, {"36x50", 9.077e-6, 971.18e-6}, {"56x100", 14.122e-6, 1510.73e-6}};
  double x_peak = 0, x_trough = 0;
  for (const auto& r : rows) {
    CAPTURE(r.preset);
    const auto L = dc_locus(default_x_grid(), coeffs(r.preset));
    CHECK(L.i_c1 == doctest::Approx(r.i1).epsilon(5e-3));
    CHECK(L.i_c2 == doctest::Approx(r.i2).epsilon(5e-3));
    CHECK(L.i_c1 < L.i_c2);
    CHECK(std::abs(L.peak.x_Q.x() - 0.00567) <= 1e-4);
    CHECK(std::abs(L.trough.x_Q.x() - 0.60628) <= 1e-4);
    if (x_peak == 0) {
      x_peak = L.peak.x_Q.x();
      x_trough = L.trough.x_Q.x();
    }
    CHECK(std::abs(L.peak.x_Q.x() - x_peak) <= 1e-4);
    CHECK(std::abs(L.trough.x_Q.x() - x_trough) <= 1e-4);
  }
}

TEST_CASE("NDR sign pattern along the locus") {
  const auto c = coeffs("default");
  const auto L = dc_locus(default_x_grid(), c);
  for (std::size_t k = 1; k + 1 < L.points.size(); ++k) {
    const auto& a = L.points[k - 1];
    const auto& b = L.points[k + 1];
    const double slope = (b.v_Q - a.v_Q) / (b.i_Q - a.i_Q);
    const double i = L.points[k].i_Q;
    if (i < 0.999 * L.i_c1 || i > 1.001 * L.i_c2) CHECK(slope > 0);
    if (i > 1.001 * L.i_c1 && i < 0.999 * L.i_c2) CHECK(slope < 0);
  }
  // approaches the origin as x -> 0, though only logarithmically
  double pi = INFINITY, pv = INFINITY;
  for (double u : {-1e2, -1e4, -1e6, -1e8}) {
    const auto q = fixed_point_at_state(StateFraction::from_log(u), c);
    CHECK(q.i_Q < pi);
    CHECK(q.v_Q < pv);
    pi = q.i_Q;
    pv = q.v_Q;
  }
  CHECK(pi < 1e-8);
  CHECK(pv < 1e-3);
}

TEST_CASE("fixed points under constant voltage") {
  const auto c = coeffs("default");
  CHECK(fixed_points_const_voltage(0.05, c).empty());
  const auto r = fixed_points_const_voltage(0.1, c);
  REQUIRE(r.size() == 2);
  CHECK(r[0].x.x() < r[1].x.x());
  CHECK(r[0].stability == Stability::unstable);
  CHECK(r[1].stability == Stability::stable);
  // arrowheads: flow points into the stable root
  const auto& s = r[1].x;
  CHECK(kinetic_voltage(StateFraction::from_log(s.log() - 1e-3), 0.1, c) > 0);
  CHECK(kinetic_voltage(StateFraction::from_log(s.log() + 1e-3), 0.1, c) < 0);
  for (double v : {0.3, 1.0, 2.0})
    for (const auto& q : fixed_points_const_voltage(v, c))
      CHECK(std::abs(kinetic_voltage(q.x, v, c)) <= 1e-6 * std::abs(kinetic_voltage(q.x, 0.0, c)));
}

TEST_CASE("saddle-node voltage") {
  const auto c = coeffs("default");
  const auto r = saddle_node_voltage(c);
  CHECK(std::abs(r.v_star - 0.0973) <= 1e-3);
  CHECK(r.roots_below == 0);
  CHECK(r.roots_above == 2);
  REQUIRE(r.root_pairs.size() == 1);
  CHECK(r.root_pairs[0].stability == Stability::semi_stable);
  CHECK(fixed_points_const_voltage(r.v_star - 1e-3, c).empty());
  CHECK(fixed_points_const_voltage(r.v_star + 1e-3, c).size() == 2);
}

TEST_CASE("saddle-node voltage for the small device matches a grid bisection") {
  const auto c = coeffs("10x10");
  // oracle: bisection on the sign of the dense-grid maximum of the route
  std::vector<StateFraction> grid;
  for (double u : num::linspace(std::log(1e-10), std::log(1 - 1e-9), 40000)) grid.push_back(StateFraction::from_log(u));
  auto grid_max = [&](double v) {
    double m = -INFINITY;
    for (const auto& s : grid) m = std::max(m, kinetic_voltage(s, v, c));
    return m;
  };
  double lo = 0.01, hi = 1.0;
  for (int k = 0; k < 40; ++k) {
    const double mid = 0.5 * (lo + hi);
    (grid_max(mid) < 0 ? lo : hi) = mid;
  }
  const auto r = saddle_node_voltage(c);
  CHECK(r.v_star == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-5));
  CHECK(r.v_star <= 0.5 * (lo + hi) * (1 + 1e-9));  // the grid can only underestimate the maximum
}

TEST_CASE("stability labels") {
  CHECK(to_string(Stability::stable) == "stable");
  CHECK(to_string(Stability::unstable) == "unstable");
  CHECK(to_string(Stability::semi_stable) == "semi-stable");
}
