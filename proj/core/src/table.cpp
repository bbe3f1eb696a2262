#include "polrhet/table.hpp"

#include <algorithm>
#include <unordered_map>

#include "polrhet/errors.hpp"

namespace polrhet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

bool DataTable::has_column(std::string_view name) const {
  return columns_.find(name) != columns_.end();
}

DataTable::Kind DataTable::kind(std::string_view name) const { return get(name).kind; }

const DataTable::Column& DataTable::get(std::string_view name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw SchemaError("missing column '" + std::string(name) + "'");
  return it->second;
}

DataTable::Column& DataTable::get(std::string_view name) {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw SchemaError("missing column '" + std::string(name) + "'");
  return it->second;
}

void DataTable::add_numeric(std::string name, std::vector<double> values) {
  if (n_cols() == 0 && n_rows_ == 0) n_rows_ = values.size();
  if (values.size() != n_rows_)
    throw SchemaError("column '" + name + "' has " + std::to_string(values.size()) +
                      " rows, table has " + std::to_string(n_rows_));
  if (has_column(name)) throw SchemaError("duplicate column '" + name + "'");
  Column col;
  col.kind = Kind::Numeric;
  col.values = std::move(values);
  col.file_type = "real";
  columns_.emplace(name, std::move(col));
  order_.push_back(std::move(name));
}

void DataTable::add_categorical(std::string name, const std::vector<std::string>& values) {
  std::vector<int32_t> codes(values.size());
  std::vector<std::string> levels;
  std::unordered_map<std::string, int32_t> index;
  for (size_t i = 0; i < values.size(); ++i) {
    auto [it, inserted] = index.emplace(values[i], int32_t(levels.size()));
    if (inserted) levels.push_back(values[i]);
    codes[i] = it->second;
  }
  add_categorical_coded(std::move(name), std::move(codes), std::move(levels));
}

void DataTable::add_categorical_coded(std::string name, std::vector<int32_t> codes,
                                      std::vector<std::string> levels) {
  if (n_cols() == 0 && n_rows_ == 0) n_rows_ = codes.size();
  if (codes.size() != n_rows_)
    throw SchemaError("column '" + name + "' has " + std::to_string(codes.size()) +
                      " rows, table has " + std::to_string(n_rows_));
  if (has_column(name)) throw SchemaError("duplicate column '" + name + "'");
  for (int32_t c : codes)
    if (c < 0 || size_t(c) >= levels.size())
      throw SchemaError("code out of range in column '" + name + "'");
  Column col;
  col.kind = Kind::Categorical;
  col.codes = std::move(codes);
  col.levels = std::move(levels);
  col.file_type = "string";
  columns_.emplace(name, std::move(col));
  order_.push_back(std::move(name));
}

void DataTable::drop_column(std::string_view name) {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw SchemaError("missing column '" + std::string(name) + "'");
  columns_.erase(it);
  order_.erase(std::find(order_.begin(), order_.end(), name));
}

std::span<const double> DataTable::numeric(std::string_view name) const {
  const Column& col = get(name);
  if (col.kind != Kind::Numeric)
    throw SchemaError("column '" + std::string(name) + "' is not numeric");
  return col.values;
}

std::span<const int32_t> DataTable::codes(std::string_view name) const {
  const Column& col = get(name);
  if (col.kind != Kind::Categorical)
    throw SchemaError("column '" + std::string(name) + "' is not categorical");
  return col.codes;
}

const std::vector<std::string>& DataTable::levels(std::string_view name) const {
  const Column& col = get(name);
  if (col.kind != Kind::Categorical)
    throw SchemaError("column '" + std::string(name) + "' is not categorical");
  return col.levels;
}

const std::string& DataTable::label(std::string_view name, size_t row) const {
  const Column& col = get(name);
  return col.levels.at(size_t(col.codes.at(row)));
}

std::vector<int32_t> DataTable::combined_codes(std::span<const std::string> names,
                                               std::vector<std::string>* out_levels) const {
  if (names.empty()) throw SchemaError("combined_codes() with no columns");
  std::vector<std::span<const int32_t>> parts;
  std::vector<const std::vector<std::string>*> level_sets;
  for (const auto& n : names) {
    parts.push_back(codes(n));
    level_sets.push_back(&levels(n));
  }
  std::vector<int32_t> out(n_rows_);
  std::unordered_map<std::string, int32_t> index;
  std::vector<std::string> combined_levels;
  std::string key;
  for (size_t row = 0; row < n_rows_; ++row) {
    key.clear();
    for (size_t j = 0; j < parts.size(); ++j) {
      if (j) key += '\x1f';
      key += (*level_sets[j])[size_t(parts[j][row])];
    }
    auto [it, inserted] = index.emplace(key, int32_t(combined_levels.size()));
    if (inserted) combined_levels.push_back(key);
    out[row] = it->second;
  }
  if (out_levels) *out_levels = std::move(combined_levels);
  return out;
}

DataTable DataTable::filter(std::span<const char> keep) const {
  if (keep.size() != n_rows_) throw SchemaError("filter mask length mismatch");
  size_t kept = 0;
  for (char k : keep) kept += (k != 0);
  DataTable out(kept);
  for (const auto& name : order_) {
    const Column& col = columns_.find(name)->second;
    Column next;
    next.kind = col.kind;
    next.file_type = col.file_type;
    if (col.kind == Kind::Numeric) {
      next.values.reserve(kept);
      for (size_t i = 0; i < n_rows_; ++i)
        if (keep[i]) next.values.push_back(col.values[i]);
    } else {
      next.levels = col.levels;
      next.codes.reserve(kept);
      for (size_t i = 0; i < n_rows_; ++i)
        if (keep[i]) next.codes.push_back(col.codes[i]);
    }
    out.columns_.emplace(name, std::move(next));
    out.order_.push_back(name);
  }
  return out;
}

std::vector<char> DataTable::eval_filter(std::string_view expr) const {
  std::vector<char> keep(n_rows_, 1);
  expr = trim(expr);
  if (expr.empty()) return keep;
  size_t pos = 0;
  while (pos <= expr.size()) {
    size_t amp = expr.find("&&", pos);
    std::string_view clause =
        trim(amp == std::string_view::npos ? expr.substr(pos) : expr.substr(pos, amp - pos));
    if (clause.empty()) throw ConfigError("empty clause in filter '" + std::string(expr) + "'");

    static constexpr std::string_view ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    std::string_view op;
    size_t op_pos = std::string_view::npos;
    for (auto candidate : ops) {
      size_t p = clause.find(candidate);
      if (p != std::string_view::npos && (op_pos == std::string_view::npos || p < op_pos ||
                                          (p == op_pos && candidate.size() > op.size()))) {
        op = candidate;
        op_pos = p;
      }
    }
    if (op_pos == std::string_view::npos)
      throw ConfigError("no comparison in filter clause '" + std::string(clause) + "'");
    std::string name(trim(clause.substr(0, op_pos)));
    std::string_view rhs = trim(clause.substr(op_pos + op.size()));
    if (name.empty() || rhs.empty())
      throw ConfigError("malformed filter clause '" + std::string(clause) + "'");

    if (rhs.front() == '"') {
      if (rhs.size() < 2 || rhs.back() != '"')
        throw ConfigError("unterminated string in filter clause '" + std::string(clause) + "'");
      std::string want(rhs.substr(1, rhs.size() - 2));
      if (op != "==" && op != "!=")
        throw ConfigError("operator '" + std::string(op) + "' not valid for string comparison");
      auto col_codes = codes(name);
      const auto& lv = levels(name);
      int32_t want_code = -1;
      for (size_t i = 0; i < lv.size(); ++i)
        if (lv[i] == want) want_code = int32_t(i);
      for (size_t i = 0; i < n_rows_; ++i) {
        bool eq = col_codes[i] == want_code;
        if (!(op == "==" ? eq : !eq)) keep[i] = 0;
      }
    } else {
      double want = parse_real(rhs, name);
      auto vals = numeric(name);
      for (size_t i = 0; i < n_rows_; ++i) {
        double v = vals[i];
        bool ok = op == "==" ? v == want
                : op == "!=" ? v != want
                : op == "<=" ? v <= want
                : op == ">=" ? v >= want
                : op == "<"  ? v < want
                             : v > want;
        if (!ok) keep[i] = 0;
      }
    }
    if (amp == std::string_view::npos) break;
    pos = amp + 2;
  }
  return keep;
}

DataTable DataTable::from_file(const TableFile& file) {
  DataTable out(file.rows.size());
  for (size_t c = 0; c < file.schema.size(); ++c) {
    const auto& spec = file.schema[c];
    if (spec.type == "int" || spec.type == "real" || spec.type == "bool") {
      std::vector<double> values(file.rows.size());
      for (size_t r = 0; r < file.rows.size(); ++r) {
        const std::string& cell = file.rows[r][c];
        values[r] = spec.type == "bool" ? double(parse_bool(cell, spec.name))
                                        : parse_real(cell, spec.name);
      }
      out.add_numeric(spec.name, std::move(values));
    } else {
      std::vector<std::string> values(file.rows.size());
      for (size_t r = 0; r < file.rows.size(); ++r) values[r] = file.rows[r][c];
      out.add_categorical(spec.name, values);
      out.get(spec.name).file_type = spec.type;
    }
  }
  return out;
}

TableFile DataTable::to_file(const std::map<std::string, std::string>& provenance) const {
  TableFile file;
  file.provenance = provenance;
  for (const auto& name : order_) {
    const Column& col = columns_.find(name)->second;
    file.schema.push_back({name, col.file_type});
  }
  file.rows.resize(n_rows_, std::vector<std::string>(order_.size()));
  for (size_t c = 0; c < order_.size(); ++c) {
    const Column& col = columns_.find(order_[c])->second;
    for (size_t r = 0; r < n_rows_; ++r) {
      file.rows[r][c] = col.kind == Kind::Numeric ? format_real(col.values[r])
                                                  : col.levels[size_t(col.codes[r])];
    }
  }
  return file;
}

}  // namespace polrhet
