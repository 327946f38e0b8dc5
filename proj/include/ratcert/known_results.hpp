#pragma once

// Known rationality results for moduli of plane curves of degree d, shipped
// as a static table. Rows whose method this tool implements can be
// re-certified live.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ratcert {

struct TableRow {
  int d = 0;
  bool rational = false;
  std::optional<std::string> method;  // absent for unknown rows
  std::string citation;
  std::optional<std::string> certificate;  // report path when verified here

  bool live_verifiable() const;
};

/// Throws InvalidInput for d < 1.
TableRow table_row(int d);
std::vector<TableRow> table_rows(int from, int to);
std::vector<int> unknown_degrees(const std::vector<TableRow>& rows);

/// Fixed-width text rendering followed by the line "unknown: d1, d2, ...".
std::string render_table(const std::vector<TableRow>& rows);

nlohmann::json to_json(const TableRow& row);

}  // namespace ratcert
