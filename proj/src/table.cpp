#include "doubling/table.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "doubling/errors.hpp"

namespace doubling {

namespace {
constexpr std::string_view kConfigPrefix = "# config: ";
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ValidationError("table row has wrong number of cells");
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    if (std::isnan(*d)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return std::to_string(*u);
  return std::get<std::string>(cell);
}

void write_csv(const Table& table, const std::string& command, const nlohmann::json& config,
               std::ostream& out) {
  out << "# doubling " << command << '\n' << kConfigPrefix << config.dump() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << '\n';
  }
}

void write_json(const Table& table, const std::string& command, const nlohmann::json& config,
                std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const Cell& cell : row) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) r.push_back(v);
              else r.push_back(nullptr);
            } else {
              r.push_back(v);
            }
          },
          cell);
    }
    rows.push_back(std::move(r));
  }
  nlohmann::json doc = {
      {"command", command}, {"config", config}, {"columns", table.columns}, {"rows", rows}};
  out << doc.dump(2) << '\n';
}

nlohmann::json read_provenance(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && line.starts_with("#")) {
    if (line.starts_with(kConfigPrefix)) {
      return nlohmann::json::parse(line.substr(kConfigPrefix.size()));
    }
  }
  throw ValidationError("no provenance config header found");
}

}  // namespace doubling
