#pragma once

#include <string>
#include <vector>

namespace cpm {

/// Column-oriented numeric table with an attached configuration record
/// (serialized JSON, stored verbatim). Formatting is plain snprintf with a
/// fixed precision, so identical tables serialize to identical bytes.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string config_json = "{}";
};

/// CSV with a '#'-prefixed config comment line and a header row; '.' decimal
/// separator, ',' field separator.
std::string to_csv(const Table& table);

/// {"config": <config>, "series": {"columns": [...], "rows": [[...], ...]}}
std::string to_json(const Table& table);

/// Shortest-ish fixed formatting used by both writers ("%.12g").
std::string format_number(double v);

}  // namespace cpm
