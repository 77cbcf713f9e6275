#include "mott/config.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mott {

namespace {

std::string_view trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// "<number> [unit]"; the unit, when given, must be the expected SI unit
double parse_quantity(std::string_view text, std::string_view unit, int line) {
  text = trim(text);
  double v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || !std::isfinite(v)) throw parse_error("malformed number '" + std::string(text) + "'", line);
  const auto rest = trim(std::string_view(p, static_cast<std::size_t>(end - p)));
  if (!rest.empty() && rest != unit)
    throw parse_error("expected unit '" + std::string(unit) + "', got '" + std::string(rest) + "'", line);
  return v;
}

std::size_t parse_count(std::string_view text, int line) {
  text = trim(text);
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw parse_error("malformed count", line);
  return v;
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

Setter q(double DeviceParams::*m, std::string_view unit) {
  return [m, unit](RunConfig& c, std::string_view v, int l) { c.device.*m = parse_quantity(v, unit, l); };
}
Setter qc(double CircuitParams::*m, std::string_view unit) {
  return [m, unit](RunConfig& c, std::string_view v, int l) { c.circuit.*m = parse_quantity(v, unit, l); };
}
Setter qg(double GridConfig::*m, std::string_view unit) {
  return [m, unit](RunConfig& c, std::string_view v, int l) { c.grids.*m = parse_quantity(v, unit, l); };
}
Setter ng(std::size_t GridConfig::*m) {
  return [m](RunConfig& c, std::string_view v, int l) { c.grids.*m = parse_count(v, l); };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"device",
       {{"c_p", q(&DeviceParams::c_p, "J/(m^3 K)")},
        {"dh_tr", q(&DeviceParams::dh_tr, "J/m^3")},
        {"kappa", q(&DeviceParams::kappa, "W/(m K)")},
        {"rho_met", q(&DeviceParams::rho_met, "Ohm m")},
        {"rho_ins", q(&DeviceParams::rho_ins, "Ohm m")},
        {"dT", q(&DeviceParams::dT, "K")},
        {"r_ch", q(&DeviceParams::r_ch, "m")},
        {"L_ch", q(&DeviceParams::L_ch, "m")},
        {"T0", q(&DeviceParams::T0, "K")},
        {"Tc", q(&DeviceParams::Tc, "K")}}},
      {"circuit",
       {{"Rs", qc(&CircuitParams::Rs, "Ohm")},
        {"Cp", qc(&CircuitParams::Cp, "F")},
        {"Vdc", qc(&CircuitParams::Vdc, "V")}}},
      {"grids",
       {{"x_points", ng(&GridConfig::x_points)},
        {"i_min", qg(&GridConfig::i_min, "A")},
        {"i_max", qg(&GridConfig::i_max, "A")},
        {"i_points", ng(&GridConfig::i_points)},
        {"f_min", qg(&GridConfig::f_min, "Hz")},
        {"f_max", qg(&GridConfig::f_max, "Hz")},
        {"f_points", ng(&GridConfig::f_points)},
        {"param_from", [](RunConfig& c, std::string_view v, int l) { c.grids.param_from = parse_quantity(v, "", l); }},
        {"param_to", [](RunConfig& c, std::string_view v, int l) { c.grids.param_to = parse_quantity(v, "", l); }},
        {"param_steps", ng(&GridConfig::param_steps)}}},
      {"output",
       {{"dir", [](RunConfig& c, std::string_view v, int) { c.output.dir = std::string(trim(v)); }},
        {"formats", [](RunConfig& c, std::string_view v, int l) {
           try {
             c.output.formats = parse_formats(v);
           } catch (const invalid_parameter& e) {
             throw parse_error(e.what(), l);
           }
         }}}},
  };
  return s;
}

}  // namespace

std::set<std::string> parse_formats(std::string_view list) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const auto tok = trim(list.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!tok.empty()) {
      if (tok != "csv" && tok != "json" && tok != "svg")
        throw invalid_parameter("unknown output format '" + std::string(tok) + "'");
      out.emplace(tok);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw invalid_parameter("empty format list");
  return out;
}

RunConfig parse_config_text(std::string_view text, RunConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto c = s.find_first_of("#;"); c != std::string_view::npos) s = s.substr(0, c);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw parse_error("unterminated section header", line);
      section = std::string(trim(s.substr(1, s.size() - 2)));
      if (!schema().count(section)) throw parse_error("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw parse_error("expected 'key = value'", line);
    if (section.empty()) throw parse_error("key outside of any section", line);
    const std::string key(trim(s.substr(0, eq)));
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw parse_error("unknown key '" + key + "' in [" + section + "]", line);
    it->second(cfg, s.substr(eq + 1), line);
  }
  cfg.device.validate();
  cfg.circuit.validate();
  return cfg;
}

RunConfig parse_config(const std::optional<std::string>& path, std::string_view device_preset) {
  RunConfig base;
  base.device = device_preset.empty() ? default_device() : mott::device_preset(device_preset);
  if (!path) {
    base.device.validate();
    return base;
  }
  std::ifstream f(*path);
  if (!f) throw parse_error("cannot read config file '" + *path + "'", 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), base);
}

}  // namespace mott
