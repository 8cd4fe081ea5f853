#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace vdbtherm::cli {

using Cell = std::variant<double, long long, std::string>;
using Row = std::vector<Cell>;

struct Table {
  std::string schema_id;
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

/// Column list for a named schema; throws std::out_of_range if unknown.
const std::vector<std::string>& schema_columns(const std::string& schema_id);

Table make_table(const std::string& schema_id);

std::string format_cell(const Cell& c);

/// Writes `# ` comment lines, the header and the rows.  Rows must match the header width.
void emit_csv(const Table& table, const std::vector<std::string>& comments, std::ostream& out);

/// As above to a file; I/O failures throw std::runtime_error with the OS message.
void emit_csv(const Table& table, const std::vector<std::string>& comments,
              const std::filesystem::path& path);

}  // namespace vdbtherm::cli
