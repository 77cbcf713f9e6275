#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mott/model.hpp"
#include "mott/pa_circuit.hpp"

namespace mott {

struct parse_error : std::runtime_error {
  parse_error(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  int line;
};

struct GridConfig {
  std::size_t x_points = 4000;
  double i_min = 1e-6, i_max = 2e-3;  // A
  std::size_t i_points = 400;
  double f_min = 1e6, f_max = 1e12;   // Hz
  std::size_t f_points = 400;
  std::optional<double> param_from, param_to;
  std::size_t param_steps = 21;
};

struct OutputConfig {
  std::string dir;  // empty: stdout only
  std::set<std::string> formats{"csv", "json"};
};

struct RunConfig {
  DeviceParams device;
  CircuitParams circuit;
  GridConfig grids;
  OutputConfig output;
};

// Sections [device], [circuit], [grids], [output]; `key = value [unit]`.
// '#' and ';' start comments. Unknown sections/keys are rejected.
RunConfig parse_config_text(std::string_view text, RunConfig base = {});
RunConfig parse_config(const std::optional<std::string>& path, std::string_view device_preset);

std::set<std::string> parse_formats(std::string_view list);

}  // namespace mott
