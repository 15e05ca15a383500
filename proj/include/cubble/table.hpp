/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cubble/scalar.hpp"

namespace cubble {

class Table;
using TablePtr = std::shared_ptr<const Table>;

/// A named, typed column with a per-row validity flag.
///
/// Storage is one contiguous vector per kind: Float64 as double, Int64 and
/// Time as int64 (Time counts in the column's TimeKind base unit), Text as
/// std::string, Bool as one byte, Nested as shared immutable tables. Missing
/// cells keep a default value in storage and a zero validity byte.
class Column {
 public:
  Column(std::string name, Kind kind, TimeKind time_kind = TimeKind::Date);

  static Column from_scalars(std::string name, Kind kind, std::span<const Scalar> values,
                             TimeKind time_kind = TimeKind::Date);
  static Column of_doubles(std::string name, std::vector<double> values);
  static Column of_ints(std::string name, std::vector<std::int64_t> values);
  static Column of_texts(std::string name, std::vector<std::string> values);
  static Column of_times(std::string name, TimeKind kind, std::vector<std::int64_t> counts);
  static Column of_tables(std::string name, std::vector<TablePtr> tables);

  const std::string& name() const noexcept { return name_; }
  Kind kind() const noexcept { return kind_; }
  TimeKind time_kind() const noexcept { return time_kind_; }
  std::size_t size() const noexcept { return valid_.size(); }
  bool empty() const noexcept { return valid_.empty(); }

  bool is_missing(std::size_t row) const { return valid_[row] == 0; }
  bool is_numeric() const noexcept { return kind_ == Kind::Float64 || kind_ == Kind::Int64; }

  Scalar at(std::size_t row) const;
  double f64(std::size_t row) const { return std::get<std::vector<double>>(cells_)[row]; }
  std::int64_t i64(std::size_t row) const { return std::get<std::vector<std::int64_t>>(cells_)[row]; }
  const std::string& text(std::size_t row) const { return std::get<std::vector<std::string>>(cells_)[row]; }
  bool boolean(std::size_t row) const { return std::get<std::vector<std::uint8_t>>(cells_)[row] != 0; }
  const Table& nested(std::size_t row) const;
  const TablePtr& nested_ptr(std::size_t row) const { return std::get<std::vector<TablePtr>>(cells_)[row]; }
  TimePoint time(std::size_t row) const { return {time_kind_, i64(row)}; }

  /// Numeric view: Float64, Int64 and Time (as the raw count). nullopt when
  /// the cell is missing or the kind has no numeric reading.
  std::optional<double> numeric(std::size_t row) const;

  /// Whole column as doubles with NaN for missing cells. Requires a kind
  /// accepted by numeric().
  std::vector<double> to_doubles() const;

  /// Canonical text of a cell, "" for missing.
  std::string cell_text(std::size_t row) const;

  void reserve(std::size_t n);
  /// Appends a scalar; throws Error when its kind does not match the column.
  void push(const Scalar& value);
  void push_missing();
  /// Appends row `row` of a column with the same kind (and time kind).
  void push_from(const Column& src, std::size_t row);

  Column take(std::span<const std::size_t> rows) const;
  Column renamed(std::string name) const;
  Column empty_like() const;

  bool same_type(const Column& other) const noexcept {
    return kind_ == other.kind_ && (kind_ != Kind::Time || time_kind_ == other.time_kind_);
  }

  /// Bytes held by this column, including heap storage of strings and the
  /// recursive size of nested tables.
  std::size_t footprint_bytes() const;

  /// Deep equality: name, type, validity, and bitwise-equal values in every
  /// non-missing cell.
  friend bool operator==(const Column& a, const Column& b);

 private:
  using Cells = std::variant<std::vector<double>, std::vector<std::int64_t>,
                             std::vector<std::string>, std::vector<std::uint8_t>,
                             std::vector<TablePtr>>;

  std::string name_;
  Kind kind_;
  TimeKind time_kind_;
  Cells cells_;
  std::vector<std::uint8_t> valid_;
};

struct Field {
  std::string name;
  Kind kind = Kind::Text;
  TimeKind time_kind = TimeKind::Date;

  friend bool operator==(const Field& a, const Field& b) {
    return a.name == b.name && a.kind == b.kind && (a.kind != Kind::Time || a.time_kind == b.time_kind);
  }
};

using Schema = std::vector<Field>;

/// Ordered set of equal-length columns with distinct, non-empty names.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  std::size_t num_rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t num_columns() const noexcept { return columns_.size(); }

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  /// Throws Error naming the column when absent.
  const Column& column(std::string_view name) const;
  const Column* find(std::string_view name) const;
  std::optional<std::size_t> position(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::vector<std::string> names() const;
  Schema schema() const;

  Table take(std::span<const std::size_t> rows) const;
  Table select(std::span<const std::string> names) const;
  Table drop(std::span<const std::string> names) const;
  /// Replaces a same-named column in place or appends a new one.
  Table with_column(Column column) const;
  Table empty_like() const;

  std::size_t footprint_bytes() const;

  /// Row-concatenation of tables with identical schemas.
  static Table concat(std::span<const Table> parts);

  friend bool operator==(const Table& a, const Table& b) { return a.columns_ == b.columns_; }

 private:
  std::vector<Column> columns_;
};

/// Read-only view of one table row, handed to row predicates and
/// expressions.
class RowView {
 public:
  RowView(const Table& table, std::size_t row) : table_(&table), row_(row) {}

  std::size_t row() const noexcept { return row_; }
  const Table& table() const noexcept { return *table_; }
  Scalar operator[](std::string_view column) const { return table_->column(column).at(row_); }
  std::optional<double> number(std::string_view column) const {
    return table_->column(column).numeric(row_);
  }
  const Table& nested(std::string_view column) const { return table_->column(column).nested(row_); }

 private:
  const Table* table_;
  std::size_t row_;
};

}  // namespace cubble
