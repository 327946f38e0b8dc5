#include "ratcert/known_results.hpp"

#include <fmt/format.h>

#include "ratcert/errors.hpp"
#include "ratcert/known_results_data.hpp"

namespace ratcert {
namespace {

const nlohmann::json& table_data() {
  static const nlohmann::json data = nlohmann::json::parse(detail::kKnownResultsJson);
  return data;
}

TableRow row_from(int d, const nlohmann::json& j) {
  TableRow r;
  r.d = d;
  r.rational = j.at("status").get<std::string>() == "rational";
  if (j.contains("method")) r.method = j.at("method").get<std::string>();
  r.citation = j.value("citation", "");
  return r;
}

}  // namespace

bool TableRow::live_verifiable() const {
  return method && (*method == "double-bundle" || *method == "covariant-S" || *method == "covariant-T");
}

TableRow table_row(int d) {
  if (d < 1) throw InvalidInput("degree must be positive");
  const auto& data = table_data();
  for (const auto& j : data.at("rows")) {
    if (j.at("d").get<int>() == d) return row_from(d, j);
  }
  const auto& large = data.at("large");
  if (d < large.at("from").get<int>()) throw InternalError("table has no row for d = " + std::to_string(d));
  for (const auto& j : large.at("exceptions")) {
    if (j.at("d").get<int>() == d) return row_from(d, j);
  }
  nlohmann::json j = large.at("byResidueMod3").at(std::to_string(d % 3));
  j["status"] = large.at("status");
  return row_from(d, j);
}

std::vector<TableRow> table_rows(int from, int to) {
  if (from < 1 || to < from) throw InvalidInput("table range must satisfy 1 <= from <= to");
  std::vector<TableRow> rows;
  for (int d = from; d <= to; ++d) rows.push_back(table_row(d));
  return rows;
}

std::vector<int> unknown_degrees(const std::vector<TableRow>& rows) {
  std::vector<int> out;
  for (const auto& r : rows) {
    if (!r.rational) out.push_back(r.d);
  }
  return out;
}

std::string render_table(const std::vector<TableRow>& rows) {
  auto line = [](const std::string& d, const std::string& status, const std::string& method,
                 const std::string& source) {
    std::string s = fmt::format("{:>4}  {:<9} {:<14} {}", d, status, method, source);
    s.erase(s.find_last_not_of(' ') + 1);
    return s + "\n";
  };
  std::string out = line("d", "status", "method", "source");
  for (const auto& r : rows) {
    out += line(std::to_string(r.d), r.rational ? "rational" : "unknown", r.method.value_or("-"),
                r.certificate ? "verified: " + *r.certificate : r.citation);
  }
  out += fmt::format("unknown: {}\n", fmt::join(unknown_degrees(rows), ", "));
  return out;
}

nlohmann::json to_json(const TableRow& row) {
  nlohmann::json j = {{"d", row.d}, {"status", row.rational ? "rational" : "unknown"}};
  j["method"] = row.method ? nlohmann::json(*row.method) : nlohmann::json(nullptr);
  j["citation"] = row.citation;
  j["liveVerifiable"] = row.live_verifiable();
  j["certificate"] = row.certificate ? nlohmann::json(*row.certificate) : nlohmann::json(nullptr);
  return j;
}

}  // namespace ratcert
