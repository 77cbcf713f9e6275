#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mott/model.hpp"
#include "mott/pa_circuit.hpp"

namespace mott {

struct stiffness_error : solver_error {
  using solver_error::solver_error;
};

struct Tolerances {
  double rtol = 1e-9;
  double atol_lnx = 1e-10;  // on ln x
  double atol_v = 1e-9;     // V
};

struct IntegrateOptions {
  Tolerances tol;
  double max_step = 0;           // s, 0 = unlimited; doubles as max output spacing
  double h_min = 1e-24;          // s, below this the step is declared stiff
  double fixed_step = 0;         // s, > 0 disables error control (order checks)
  std::size_t max_steps = 50'000'000;
  double record_from = 0;        // s, samples before this are not stored
  // clamp band on x; steps landing outside are rejected and halved
  double x_lo = 1e-300;
  double x_hi = 1.0 - 1e-9;
};

enum class TrajectoryStatus { converged_fixed_point, periodic, horizon_reached, clamped };
std::string to_string(TrajectoryStatus s);

struct Trajectory {
  std::vector<double> t, lnx, v;
  std::size_t accepted = 0, rejected = 0;
  TrajectoryStatus status = TrajectoryStatus::horizon_reached;
  double x(std::size_t k) const;
};

// ic = (x0, v0)
Trajectory integrate(std::array<double, 2> ic, const CircuitParams& cp, const ModelCoefficients& c,
                     double horizon, const IntegrateOptions& opts = {});

IntegrateOptions default_options(const CircuitParams& cp);

enum class CycleVerdict { fixed_point, limit_cycle, inconclusive };
std::string to_string(CycleVerdict v);

struct LimitCycle {
  double T_lc = 0;          // s, from v crossings
  double T_lc_x = 0;        // s, from ln x crossings
  double x_min = 0, x_max = 0, v_min = 0, v_max = 0;
  std::vector<std::array<double, 3>> cycle;  // (t, x, v) over one period
  std::size_t n_periods_used = 0;
  double period_rel_std = 0;
};

struct CycleReport {
  CycleVerdict verdict = CycleVerdict::inconclusive;
  LimitCycle lc;            // valid for limit_cycle
  double x_fp = 0, v_fp = 0;  // final state, meaningful for fixed_point
  double swing = 0;         // post-transient v peak-to-peak (V)
  double t_transient = 0;   // s, start of the analysed window
};

CycleReport detect_limit_cycle(const Trajectory& traj, const CircuitParams& cp);

// integrated winding of the orbit around (x_c, v_c) in turns; negative = clockwise
double winding_turns(const Trajectory& traj, double x_c, double v_c, double t_from = 0);

struct OrbitSummary {
  double x0 = 0, v0 = 0;
  CycleReport report;
  double winding = 0;
};

struct Portrait {
  std::vector<OrbitSummary> orbits;
  std::size_t n_cycle = 0, n_fixed = 0, n_inconclusive = 0;
  double period_min = 0, period_max = 0;  // over limit-cycle orbits
};

std::vector<std::array<double, 2>> ic_grid(std::size_t nx, std::size_t nv, double x_lo = 0.05,
                                           double x_hi = 0.95, double v_lo = 0.06,
                                           double v_hi = 1.14);

Portrait phase_portrait(const std::vector<std::array<double, 2>>& ics, const CircuitParams& cp,
                        const ModelCoefficients& c, double horizon, unsigned jobs = 0);

struct BifurcationPoint {
  double value = 0;
  CycleReport report;
};

struct Onset {
  double lo = 0, hi = 0;    // predicate false at lo ... true at hi (or reversed)
  bool rising = true;       // oscillation appears with increasing parameter
  bool verified = false;    // bracket confirmed at twice the horizon it was found with
  double value() const { return 0.5 * (lo + hi); }
};

struct SweepOptions {
  std::array<double, 2> ic{0.1, 0.39};
  double horizon = 0;       // s, 0 = max(1 us, 200 Rs Cp)
  bool refine = true;
  double resolution = 0;    // 0 = per-parameter default
  unsigned jobs = 0;
};

struct BifurcationDiagram {
  CircuitParam param = CircuitParam::Rs;
  std::vector<BifurcationPoint> points;
  std::vector<Onset> onsets;
};

bool oscillates(const CycleReport& r);
double default_resolution(CircuitParam p);

CycleReport simulate_and_classify(CircuitParam vary, double value, const CircuitParams& fixed,
                                  const ModelCoefficients& c, const SweepOptions& opt,
                                  double horizon_scale = 1.0);

BifurcationDiagram bifurcation_sweep(CircuitParam vary, const std::vector<double>& grid,
                                     const CircuitParams& fixed, const ModelCoefficients& c,
                                     const SweepOptions& opt = {});

}  // namespace mott
