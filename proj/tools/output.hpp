#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace loopsoup::cli {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

enum class Format { csv, json };

inline constexpr int kSchemaVersion = 1;

// 17 significant digits, '.' decimal point, "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

void write_csv(std::ostream& os, const Table& t);
// {"schema_version", "command", "config", "columns", "rows": [{column: value}]}
void write_json(std::ostream& os, const std::string& command, const nlohmann::json& config, const Table& t);
void write_table(std::ostream& os, Format f, const std::string& command, const nlohmann::json& config,
                 const Table& t);

nlohmann::json cell_to_json(const Cell& c);

// Writes to path, or to stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text);

}  // namespace loopsoup::cli
