#include "polrhet/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polrhet/errors.hpp"

namespace polrhet {

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

const std::vector<std::string> kKnownTypes = {"string", "int", "real", "bool", "date", "timestamp"};

bool known_type(const std::string& t) {
  for (const auto& k : kKnownTypes)
    if (k == t) return true;
  return false;
}

}  // namespace

size_t TableFile::column(std::string_view name) const {
  size_t i = find_column(name);
  if (i == npos) throw SchemaError("missing column '" + std::string(name) + "'");
  return i;
}

size_t TableFile::find_column(std::string_view name) const {
  for (size_t i = 0; i < schema.size(); ++i)
    if (schema[i].name == name) return i;
  return npos;
}

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (size_t i = 0; i < field.size(); ++i) {
    char c = field[i];
    if (c != '\\') {
      out += c;
      continue;
    }
    if (i + 1 >= field.size()) throw SchemaError("dangling backslash in field");
    char e = field[++i];
    switch (e) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default: throw SchemaError(std::string("unknown escape '\\") + e + "' in field");
    }
  }
  return out;
}

TableFile read_table_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  TableFile table;
  std::string line;
  size_t lineno = 0;
  bool have_schema = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      auto cells = split_tabs(line);
      if (cells.empty() || cells[0] != "#schema")
        throw SchemaError("'" + path.string() + "' does not start with a #schema line");
      for (size_t i = 1; i < cells.size(); ++i) {
        size_t colon = cells[i].rfind(':');
        if (colon == std::string::npos)
          throw SchemaError("schema entry '" + cells[i] + "' lacks a :type suffix");
        ColumnSpec spec{cells[i].substr(0, colon), cells[i].substr(colon + 1)};
        if (spec.name.empty() || !known_type(spec.type))
          throw SchemaError("bad schema entry '" + cells[i] + "'");
        table.schema.push_back(std::move(spec));
      }
      if (table.schema.empty()) throw SchemaError("empty schema in '" + path.string() + "'");
      have_schema = true;
      continue;
    }
    if (!line.empty() && line[0] == '#') {
      auto cells = split_tabs(line);
      if (cells[0] == "#provenance") {
        for (size_t i = 1; i < cells.size(); ++i) {
          size_t eq = cells[i].find('=');
          if (eq == std::string::npos)
            throw SchemaError("bad provenance entry '" + cells[i] + "'");
          table.provenance[cells[i].substr(0, eq)] = unescape_field(cells[i].substr(eq + 1));
        }
      }
      // Other '#' lines are comments.
      continue;
    }
    auto cells = split_tabs(line);
    if (cells.size() != table.schema.size())
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(table.schema.size()) + " cells, got " +
                        std::to_string(cells.size()));
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (auto& c : cells) row.push_back(unescape_field(c));
    table.rows.push_back(std::move(row));
  }
  if (!have_schema) throw SchemaError("'" + path.string() + "' is empty");
  return table;
}

void write_table_file(const std::filesystem::path& path, const TableFile& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  out << "#schema";
  for (const auto& c : table.schema) out << '\t' << c.name << ':' << c.type;
  out << '\n';
  if (!table.provenance.empty()) {
    out << "#provenance";
    for (const auto& [k, v] : table.provenance) out << '\t' << k << '=' << escape_field(v);
    out << '\n';
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.schema.size())
      throw SchemaError("row width " + std::to_string(row.size()) + " does not match schema width " +
                        std::to_string(table.schema.size()));
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << '\t';
      out << escape_field(row[i]);
    }
    out << '\n';
  }
  if (!out) throw SchemaError("write failed for '" + path.string() + "'");
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  // Shortest representation that round-trips: try increasing precision.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(std::string_view s, std::string_view column) {
  if (s.empty()) throw SchemaError("empty value in column '" + std::string(column) + "'");
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw SchemaError("bad real '" + std::string(s) + "' in column '" + std::string(column) + "'");
  return value;
}

int64_t parse_int(std::string_view s, std::string_view column) {
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw SchemaError("bad integer '" + std::string(s) + "' in column '" + std::string(column) + "'");
  return value;
}

bool parse_bool(std::string_view s, std::string_view column) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw SchemaError("bad bool '" + std::string(s) + "' in column '" + std::string(column) + "'");
}

void write_kv_file(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : entries) out << k << '=' << escape_field(v) << '\n';
  if (!out) throw SchemaError("write failed for '" + path.string() + "'");
}

std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError("bad line '" + line + "' in '" + path.string() + "'");
    out[line.substr(0, eq)] = unescape_field(line.substr(eq + 1));
  }
  return out;
}

}  // namespace polrhet
