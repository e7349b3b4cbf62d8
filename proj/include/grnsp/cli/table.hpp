#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace grnsp::cli {

enum class ColumnType { Real, Integer, Text };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
};

using Cell = std::variant<double, std::int64_t, std::string>;

// Named, typed table with key=value provenance lines. Rows must match the
// schema; non-finite reals are only accepted when a "status" column exists.
class ResultTable {
 public:
  ResultTable() = default;
  ResultTable(std::string name, std::vector<Column> columns);

  void add_row(std::vector<Cell> row);
  void set_provenance(const std::string& key, const std::string& value);

  const std::string& name() const { return name_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& provenance() const { return provenance_; }
  bool has_status_column() const;
  std::size_t column_index(const std::string& name) const;

 private:
  std::string name_;
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> provenance_;
};

enum class Format { Csv, Json };
Format format_from_name(const std::string& name);
const char* extension(Format f);

// %.17g for reals, with nan/inf spelled out.
std::string format_real(double v);

std::string to_csv(const ResultTable& t);
std::string to_json(const ResultTable& t);
// Inverse of to_csv. Column types are inferred: integer if every cell is a
// canonical integer literal, real if every cell is a canonical %.17g number,
// text otherwise.
ResultTable parse_csv(const std::string& text, const std::string& name = "table");

// Writes <dir>/<table name>.<ext> and returns the path.
std::filesystem::path write_table(const ResultTable& t, const std::filesystem::path& dir, Format f);

}  // namespace grnsp::cli
