#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mott/output.hpp"

namespace mott {

struct render_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FigureKind {
  route,           // x, f_x_per_s [, bias]           (POP and dynamic routes)
  dc_locus,        // i_q_A, v_q_V
  nyquist,         // re_ohm, im_ohm
  rez_map,         // i_A, f_Hz, re_ohm  (+ contour: i0_A, f0_Hz, i1_A, f1_Hz)
  trdet,           // tr, det
  nullclines,      // x, v0_V, v1_V (+ field: x, v_V, dx_dt, dv_dt) (+ points: x_q, v_q)
  phase_portrait,  // orbit, x, v_V
  bifurcation,     // value, v_min, v_max [, outcome]
  time_series,     // t_s, x, v_V
};

FigureKind parse_figure_kind(std::string_view s);

// deterministic SVG for a figure kind; tables[0] is the main data table
std::string render_figure(const std::vector<Table>& tables, FigureKind kind,
                          const std::string& title = {});

}  // namespace mott
