#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace polrhet {

// Canonical on-disk table format: UTF-8 text, one row per line, tab-separated
// cells.  The first line declares the schema:
//
//   #schema<TAB>name:type<TAB>name:type...
//
// with types string, int, real, bool, date, timestamp.  An optional second
// line carries provenance as key=value pairs:
//
//   #provenance<TAB>config_hash=...<TAB>seed=...
//
// Cell values are backslash-escaped so tabs/newlines in content round-trip:
// \t, \n, \r, \\.  An empty cell is a missing value for optional columns.

struct ColumnSpec {
  std::string name;
  std::string type;
};

struct TableFile {
  std::vector<ColumnSpec> schema;
  std::map<std::string, std::string> provenance;
  std::vector<std::vector<std::string>> rows;  // unescaped cells

  // Index of a column; throws SchemaError naming the column if absent.
  size_t column(std::string_view name) const;
  // Index if present, npos otherwise.
  size_t find_column(std::string_view name) const;
  static constexpr size_t npos = size_t(-1);
};

std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view field);

TableFile read_table_file(const std::filesystem::path& path);
void write_table_file(const std::filesystem::path& path, const TableFile& table);

// Shortest decimal representation that parses back to exactly the same
// double; integers render without an exponent where possible.
std::string format_real(double x);
double parse_real(std::string_view s, std::string_view column);
int64_t parse_int(std::string_view s, std::string_view column);
bool parse_bool(std::string_view s, std::string_view column);  // accepts 0/1/true/false

// Simple "key=value" report files ('#' starts a comment line).
void write_kv_file(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path);

}  // namespace polrhet
