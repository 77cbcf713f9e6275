#pragma once

#include <string>
#include <vector>

#include "mott/model.hpp"

namespace mott {

struct FixedPoint1D {
  StateFraction x_Q{0.5};
  double i_Q = 0;  // A
  double v_Q = 0;  // V
  double r_Q = 0;  // Ohm
};

enum class Stability { stable, unstable, semi_stable };
std::string to_string(Stability s);

struct StateRoot {
  StateFraction x{0.5};
  Stability stability = Stability::stable;
};

struct DcLocus {
  std::vector<FixedPoint1D> points;  // increasing x_Q
  FixedPoint1D peak;                 // local max of v_Q, current i_c1
  FixedPoint1D trough;               // local min of v_Q, current i_c2
  double i_c1 = 0, i_c2 = 0;
};

struct SaddleNodeResult {
  double v_star = 0;
  int roots_below = 0;
  int roots_at = 0;
  int roots_above = 0;
  std::vector<StateRoot> root_pairs;  // roots at v_star
};

double dc_current_at_state(StateFraction x, const ModelCoefficients& c);
FixedPoint1D fixed_point_at_state(StateFraction x, const ModelCoefficients& c);
// inverse of dc_current_at_state (monotone in x); i > 0
FixedPoint1D fixed_point_at_current(double i, const ModelCoefficients& c);

// log-spaced in x on [lo, 0.5] and log-spaced in 1-x on [0.5, 1-lo];
// n points in total
std::vector<StateFraction> default_x_grid(std::size_t n = 4000, double lo = 1e-6);

DcLocus dc_locus(const std::vector<StateFraction>& grid, const ModelCoefficients& c);
// refines the extrema of v_Q on an existing locus; fills peak/trough/i_c1/i_c2
void critical_currents(DcLocus& locus, const ModelCoefficients& c);

// roots of the dynamic route f_x(., v0); `tangency_tol` is the relative
// voltage perturbation within which a touching extremum counts as a root
std::vector<StateRoot> fixed_points_const_voltage(double v0, const ModelCoefficients& c,
                                                  double tangency_tol = 1e-9);

// max over x of f_x(x, v0), all interior local maxima refined
double dynamic_route_max(double v0, const ModelCoefficients& c);

SaddleNodeResult saddle_node_voltage(const ModelCoefficients& c);

}  // namespace mott
