#include "cpm/table.hpp"

#include <cstdio>

namespace cpm {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  out.reserve(64 * (table.rows.size() + 2));
  out += "# config: ";
  out += table.config_json;
  out += '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  std::string out;
  out.reserve(64 * (table.rows.size() + 2));
  out += "{\"config\": ";
  out += table.config_json;
  out += ", \"series\": {\"columns\": [";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ", ";
    out += '"';
    out += table.columns[c];
    out += '"';
  }
  out += "], \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out += ", ";
    out += '[';
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      if (c) out += ", ";
      out += format_number(table.rows[r][c]);
    }
    out += ']';
  }
  out += "]}}\n";
  return out;
}

}  // namespace cpm
