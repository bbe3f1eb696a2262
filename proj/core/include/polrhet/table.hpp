#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polrhet/io.hpp"

namespace polrhet {

// Column-oriented in-memory table.  Two column kinds cover everything the
// estimators need: numeric (double) and categorical (dense integer codes over
// a level vocabulary).  Categorical columns are what fixed-effect and cluster
// dimensions are built from; numeric columns are outcomes and regressors.
class DataTable {
 public:
  enum class Kind { Numeric, Categorical };

  DataTable() = default;
  explicit DataTable(size_t n_rows) : n_rows_(n_rows) {}

  size_t n_rows() const { return n_rows_; }
  size_t n_cols() const { return order_.size(); }
  const std::vector<std::string>& column_names() const { return order_; }

  bool has_column(std::string_view name) const;
  Kind kind(std::string_view name) const;

  void add_numeric(std::string name, std::vector<double> values);
  void add_categorical(std::string name, const std::vector<std::string>& values);
  // Pre-coded categorical (codes index into levels).
  void add_categorical_coded(std::string name, std::vector<int32_t> codes,
                             std::vector<std::string> levels);
  void drop_column(std::string_view name);

  std::span<const double> numeric(std::string_view name) const;
  std::span<const int32_t> codes(std::string_view name) const;
  const std::vector<std::string>& levels(std::string_view name) const;
  // Level string for one cell of a categorical column.
  const std::string& label(std::string_view name, size_t row) const;

  // New categorical column whose levels are the observed combinations of the
  // given categorical columns, joined with '\x1f' in input order.  Used for
  // interacted fixed-effect dimensions.
  std::vector<int32_t> combined_codes(std::span<const std::string> names,
                                      std::vector<std::string>* out_levels = nullptr) const;

  // Rows where keep[row] != 0.
  DataTable filter(std::span<const char> keep) const;

  // Evaluates a restriction like:  party == "R" && year >= 2015
  // Supported: ==, != on categorical; ==, !=, <, <=, >, >= on numeric;
  // clauses joined with &&.  An empty expression keeps every row.
  std::vector<char> eval_filter(std::string_view expr) const;

  // Typed round-trip through the on-disk table format.  int/real/bool map to
  // numeric columns; string/date/timestamp map to categorical columns.
  static DataTable from_file(const TableFile& file);
  TableFile to_file(const std::map<std::string, std::string>& provenance = {}) const;

 private:
  struct Column {
    Kind kind;
    std::vector<double> values;        // Numeric
    std::vector<int32_t> codes;        // Categorical
    std::vector<std::string> levels;   // Categorical
    std::string file_type;             // type tag used when writing
  };

  const Column& get(std::string_view name) const;
  Column& get(std::string_view name);

  size_t n_rows_ = 0;
  std::map<std::string, Column, std::less<>> columns_;
  std::vector<std::string> order_;
};

}  // namespace polrhet
