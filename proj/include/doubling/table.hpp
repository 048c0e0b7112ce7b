#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace doubling {

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// Column-labelled result rows, emitted as CSV or as the equivalent JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Doubles use %.17g (round-trip exact); NaN prints as "nan".
std::string format_cell(const Cell& cell);

/// "# doubling <command>" and "# config: <json>" comment lines, then the
/// header row and one line per row.
void write_csv(const Table& table, const std::string& command, const nlohmann::json& config,
               std::ostream& out);
/// {"command", "config", "columns", "rows"}; NaN becomes null.
void write_json(const Table& table, const std::string& command, const nlohmann::json& config,
                std::ostream& out);

/// Config embedded in a CSV provenance header; throws ValidationError if absent.
nlohmann::json read_provenance(std::istream& in);

}  // namespace doubling
