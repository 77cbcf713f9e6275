#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mott {

using Cell = std::variant<double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;  // throws if missing
  bool has(const std::string& name) const;
  double num(std::size_t row, const std::string& col) const;
};

// 9 significant digits, scientific, locale independent
std::string format_number(double v);
// the same value after a round trip through format_number
double round9(double v);

void write_csv(const Table& t, std::ostream& out);
Table read_csv(std::istream& in, std::string name = {});

// numbers rounded to 9 significant digits so that dumps are stable
nlohmann::ordered_json to_json(const Table& t);
nlohmann::ordered_json json_number(double v);

struct ResultBundle {
  std::string command;
  nlohmann::ordered_json input;
  nlohmann::ordered_json summary;           // primary JSON result (may be null)
  std::vector<Table> tables;                // first one is the primary table
  std::map<std::string, std::string> figures;  // file stem -> SVG bytes
  int exit_status = 0;
};

// Writes per the requested formats into `dir`: <cmd>[_<table>].csv, <cmd>.json,
// <stem>.svg. Returns the written paths in a fixed order.
std::vector<std::string> write_bundle(const ResultBundle& b, const std::string& dir,
                                      const std::set<std::string>& formats);

}  // namespace mott
