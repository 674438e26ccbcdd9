#pragma once

// Field serialization: two-column CSV (x,value with a header row) and a raw
// JSON array of sample values. Numbers are written with 17 significant digits.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracks/detail/format.hpp"
#include "fracks/torus_field.hpp"

namespace fracks {

/// Malformed serialized input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void write_field_csv(std::ostream& os, const Field& f) {
  os << "x,value\n";
  for (int j = 0; j < f.size(); ++j)
    os << detail::fmt17(f.grid().x(j)) << ',' << detail::fmt17(f[static_cast<std::size_t>(j)]) << '\n';
}

inline Field read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("field csv: empty input");
  if (line.rfind("x,value", 0) != 0) throw ParseError("field csv: expected header 'x,value'");
  std::vector<double> values;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("field csv: line " + std::to_string(lineno) + ": expected two columns");
    try {
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError("field csv: line " + std::to_string(lineno) + ": bad number");
    }
  }
  const TorusGrid grid(static_cast<int>(values.size()));
  return Field(grid, std::move(values));
}

inline nlohmann::json field_to_json(const Field& f) {
  return nlohmann::json(std::vector<double>(f.values().begin(), f.values().end()));
}

inline Field field_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("field json: expected an array of numbers");
  std::vector<double> values;
  values.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("field json: non-numeric entry");
    values.push_back(v.get<double>());
  }
  const TorusGrid grid(static_cast<int>(values.size()));
  return Field(grid, std::move(values));
}

}  // namespace fracks
