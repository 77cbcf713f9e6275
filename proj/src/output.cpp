#include "mott/output.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mott/model.hpp"

namespace mott {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw invalid_parameter("row width does not match header of " + name);
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& n) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == n) return k;
  throw invalid_parameter("table " + name + " has no column '" + n + "'");
}

bool Table::has(const std::string& n) const {
  for (const auto& c : columns)
    if (c == n) return true;
  return false;
}

double Table::num(std::size_t row, const std::string& col) const {
  const auto& c = rows.at(row).at(column(col));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  throw invalid_parameter("column '" + col + "' is not numeric");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 8);
  return std::string(buf, r.ptr);
}

double round9(double v) {
  if (!std::isfinite(v)) return v;
  const auto s = format_number(v);
  double out = 0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"') o += '"';
    o += ch;
  }
  return o + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

Cell parse_cell(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
  return s;
}

}  // namespace

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << csv_escape(t.columns[k]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      if (const auto* d = std::get_if<double>(&row[k]))
        out << format_number(*d);
      else
        out << csv_escape(std::get<std::string>(row[k]));
    }
    out << '\n';
  }
}

Table read_csv(std::istream& in, std::string name) {
  Table t;
  t.name = std::move(name);
  std::string line;
  if (!std::getline(in, line)) throw invalid_parameter("empty CSV");
  t.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (const auto& f : split_csv_line(line)) row.push_back(parse_cell(f));
    t.add(std::move(row));
  }
  return t;
}

nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round9(v);
}

nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (const auto* d = std::get_if<double>(&row[k]))
        r[t.columns[k]] = json_number(*d);
      else
        r[t.columns[k]] = std::get<std::string>(row[k]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::string> write_bundle(const ResultBundle& b, const std::string& dir,
                                      const std::set<std::string>& formats) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  fs::create_directories(dir);
  auto open = [&](const std::string& file) {
    const auto path = (fs::path(dir) / file).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
    return f;
  };
  if (formats.count("csv")) {
    for (std::size_t k = 0; k < b.tables.size(); ++k) {
      const auto stem = k == 0 ? b.command : b.command + "_" + b.tables[k].name;
      auto f = open(stem + ".csv");
      write_csv(b.tables[k], f);
    }
  }
  if (formats.count("json")) {
    nlohmann::ordered_json j;
    j["command"] = b.command;
    j["input"] = b.input;
    if (!b.summary.is_null()) j["result"] = b.summary;
    auto f = open(b.command + ".json");
    f << j.dump(2) << '\n';
  }
  if (formats.count("svg")) {
    for (const auto& [stem, svg] : b.figures) {
      auto f = open(stem + ".svg");
      f << svg;
    }
  }
  return written;
}

}  // namespace mott
