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

#include "cubble/table.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "cubble/error.hpp"

namespace cubble {

namespace {

template <class Vec>
std::size_t vector_bytes(const Vec& v) {
  return v.capacity() * sizeof(typename Vec::value_type);
}

std::size_t string_heap_bytes(const std::string& s) {
  // Short strings live inside the object; longer ones own a heap block.
  const std::string probe;
  return s.capacity() > probe.capacity() ? s.capacity() + 1 : 0;
}

}  // namespace

Column::Column(std::string name, Kind kind, TimeKind time_kind)
    : name_(std::move(name)), kind_(kind), time_kind_(time_kind) {
  switch (kind_) {
    case Kind::Float64: cells_ = std::vector<double>{}; break;
    case Kind::Int64:
    case Kind::Time: cells_ = std::vector<std::int64_t>{}; break;
    case Kind::Text: cells_ = std::vector<std::string>{}; break;
    case Kind::Bool: cells_ = std::vector<std::uint8_t>{}; break;
    case Kind::Nested: cells_ = std::vector<TablePtr>{}; break;
  }
}

Column Column::from_scalars(std::string name, Kind kind, std::span<const Scalar> values,
                            TimeKind time_kind) {
  Column c(std::move(name), kind, time_kind);
  c.reserve(values.size());
  for (const auto& v : values) c.push(v);
  return c;
}

Column Column::of_doubles(std::string name, std::vector<double> values) {
  Column c(std::move(name), Kind::Float64);
  c.valid_.assign(values.size(), 1);
  c.cells_ = std::move(values);
  return c;
}

Column Column::of_ints(std::string name, std::vector<std::int64_t> values) {
  Column c(std::move(name), Kind::Int64);
  c.valid_.assign(values.size(), 1);
  c.cells_ = std::move(values);
  return c;
}

Column Column::of_texts(std::string name, std::vector<std::string> values) {
  Column c(std::move(name), Kind::Text);
  c.valid_.assign(values.size(), 1);
  c.cells_ = std::move(values);
  return c;
}

Column Column::of_times(std::string name, TimeKind kind, std::vector<std::int64_t> counts) {
  Column c(std::move(name), Kind::Time, kind);
  c.valid_.assign(counts.size(), 1);
  c.cells_ = std::move(counts);
  return c;
}

Column Column::of_tables(std::string name, std::vector<TablePtr> tables) {
  Column c(std::move(name), Kind::Nested);
  c.valid_.assign(tables.size(), 1);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (!tables[i]) c.valid_[i] = 0;
  }
  c.cells_ = std::move(tables);
  return c;
}

const Table& Column::nested(std::size_t row) const {
  const auto& p = nested_ptr(row);
  if (!p) throw Error("column '" + name_ + "': nested cell " + std::to_string(row) + " is missing");
  return *p;
}

Scalar Column::at(std::size_t row) const {
  if (is_missing(row)) return Missing{};
  switch (kind_) {
    case Kind::Float64: return f64(row);
    case Kind::Int64: return i64(row);
    case Kind::Text: return text(row);
    case Kind::Bool: return boolean(row);
    case Kind::Time: return time(row);
    case Kind::Nested:
      throw Error("column '" + name_ + "' is nested and has no scalar cells");
  }
  return Missing{};
}

std::optional<double> Column::numeric(std::size_t row) const {
  if (is_missing(row)) return std::nullopt;
  switch (kind_) {
    case Kind::Float64: return f64(row);
    case Kind::Int64:
    case Kind::Time: return static_cast<double>(i64(row));
    default: return std::nullopt;
  }
}

std::vector<double> Column::to_doubles() const {
  if (kind_ != Kind::Float64 && kind_ != Kind::Int64 && kind_ != Kind::Time)
    throw Error("column '" + name_ + "' is not numeric (" + std::string(kind_name(kind_)) + ")");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = numeric(i).value_or(std::numeric_limits<double>::quiet_NaN());
  return out;
}

std::string Column::cell_text(std::size_t row) const {
  if (kind_ == Kind::Nested) {
    if (is_missing(row)) return {};
    const Table& t = nested(row);
    return "<table [" + std::to_string(t.num_rows()) + " x " + std::to_string(t.num_columns()) + "]>";
  }
  return to_text(at(row));
}

void Column::reserve(std::size_t n) {
  valid_.reserve(n);
  std::visit([n](auto& v) { v.reserve(n); }, cells_);
}

void Column::push(const Scalar& value) {
  if (cubble::is_missing(value)) {
    push_missing();
    return;
  }
  auto mismatch = [&] {
    return Error("column '" + name_ + "' (" + std::string(kind_name(kind_)) +
                 ") cannot hold a value of kind " + std::string(kind_name(kind_of(value))));
  };
  switch (kind_) {
    case Kind::Float64:
      if (!std::holds_alternative<double>(value)) throw mismatch();
      std::get<std::vector<double>>(cells_).push_back(std::get<double>(value));
      break;
    case Kind::Int64:
      if (!std::holds_alternative<std::int64_t>(value)) throw mismatch();
      std::get<std::vector<std::int64_t>>(cells_).push_back(std::get<std::int64_t>(value));
      break;
    case Kind::Text:
      if (!std::holds_alternative<std::string>(value)) throw mismatch();
      std::get<std::vector<std::string>>(cells_).push_back(std::get<std::string>(value));
      break;
    case Kind::Bool:
      if (!std::holds_alternative<bool>(value)) throw mismatch();
      std::get<std::vector<std::uint8_t>>(cells_).push_back(std::get<bool>(value) ? 1 : 0);
      break;
    case Kind::Time: {
      if (!std::holds_alternative<TimePoint>(value)) throw mismatch();
      const auto& tp = std::get<TimePoint>(value);
      if (tp.kind != time_kind_)
        throw Error("column '" + name_ + "' holds " + std::string(time_kind_name(time_kind_)) +
                    " values, got " + std::string(time_kind_name(tp.kind)));
      std::get<std::vector<std::int64_t>>(cells_).push_back(tp.count);
      break;
    }
    case Kind::Nested: throw mismatch();
  }
  valid_.push_back(1);
}

void Column::push_missing() {
  std::visit([](auto& v) { v.emplace_back(); }, cells_);
  valid_.push_back(0);
}

void Column::push_from(const Column& src, std::size_t row) {
  if (!same_type(src))
    throw Error("column '" + name_ + "': cannot append from column '" + src.name_ +
                "' of a different type");
  std::visit(
      [&](auto& dst) {
        using V = std::decay_t<decltype(dst)>;
        dst.push_back(std::get<V>(src.cells_)[row]);
      },
      cells_);
  valid_.push_back(src.valid_[row]);
}

Column Column::take(std::span<const std::size_t> rows) const {
  Column out(name_, kind_, time_kind_);
  out.valid_.reserve(rows.size());
  for (auto r : rows) out.valid_.push_back(valid_.at(r));
  std::visit(
      [&](const auto& src) {
        using V = std::decay_t<decltype(src)>;
        V dst;
        dst.reserve(rows.size());
        for (auto r : rows) dst.push_back(src[r]);
        out.cells_ = std::move(dst);
      },
      cells_);
  return out;
}

Column Column::renamed(std::string name) const {
  Column out = *this;
  out.name_ = std::move(name);
  return out;
}

Column Column::empty_like() const { return Column(name_, kind_, time_kind_); }

std::size_t Column::footprint_bytes() const {
  std::size_t total = sizeof(Column) + string_heap_bytes(name_) + vector_bytes(valid_);
  std::visit(
      [&](const auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        total += vector_bytes(v);
        if constexpr (std::is_same_v<T, std::string>) {
          for (const auto& s : v) total += string_heap_bytes(s);
        } else if constexpr (std::is_same_v<T, TablePtr>) {
          // Control block plus the owned table.
          for (const auto& p : v)
            if (p) total += 2 * sizeof(void*) + sizeof(long) * 2 + p->footprint_bytes();
        }
      },
      cells_);
  return total;
}

bool operator==(const Column& a, const Column& b) {
  if (a.name_ != b.name_ || !a.same_type(b) || a.valid_ != b.valid_) return false;
  const std::size_t n = a.size();
  switch (a.kind_) {
    case Kind::Float64: {
      const auto& x = std::get<std::vector<double>>(a.cells_);
      const auto& y = std::get<std::vector<double>>(b.cells_);
      for (std::size_t i = 0; i < n; ++i)
        if (a.valid_[i] && std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i]))
          return false;
      return true;
    }
    case Kind::Int64:
    case Kind::Time: {
      const auto& x = std::get<std::vector<std::int64_t>>(a.cells_);
      const auto& y = std::get<std::vector<std::int64_t>>(b.cells_);
      for (std::size_t i = 0; i < n; ++i)
        if (a.valid_[i] && x[i] != y[i]) return false;
      return true;
    }
    case Kind::Text: {
      const auto& x = std::get<std::vector<std::string>>(a.cells_);
      const auto& y = std::get<std::vector<std::string>>(b.cells_);
      for (std::size_t i = 0; i < n; ++i)
        if (a.valid_[i] && x[i] != y[i]) return false;
      return true;
    }
    case Kind::Bool: {
      const auto& x = std::get<std::vector<std::uint8_t>>(a.cells_);
      const auto& y = std::get<std::vector<std::uint8_t>>(b.cells_);
      for (std::size_t i = 0; i < n; ++i)
        if (a.valid_[i] && x[i] != y[i]) return false;
      return true;
    }
    case Kind::Nested: {
      const auto& x = std::get<std::vector<TablePtr>>(a.cells_);
      const auto& y = std::get<std::vector<TablePtr>>(b.cells_);
      for (std::size_t i = 0; i < n; ++i) {
        if (!a.valid_[i]) continue;
        if (x[i] != y[i] && !(*x[i] == *y[i])) return false;
      }
      return true;
    }
  }
  return false;
}

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& c : columns_) {
    if (c.name().empty()) throw Error("column names must be non-empty");
    if (!seen.insert(c.name()).second) throw Error("duplicate column name '" + c.name() + "'");
    if (c.size() != columns_.front().size())
      throw Error("column '" + c.name() + "' has " + std::to_string(c.size()) + " rows, expected " +
                  std::to_string(columns_.front().size()));
  }
}

const Column& Table::column(std::string_view name) const {
  if (const Column* c = find(name)) return *c;
  throw Error("unknown column '" + std::string(name) + "'");
}

const Column* Table::find(std::string_view name) const {
  for (const auto& c : columns_)
    if (c.name() == name) return &c;
  return nullptr;
}

std::optional<std::size_t> Table::position(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name() == name) return i;
  return std::nullopt;
}

std::vector<std::string> Table::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name());
  return out;
}

Schema Table::schema() const {
  Schema s;
  s.reserve(columns_.size());
  for (const auto& c : columns_) s.push_back({c.name(), c.kind(), c.time_kind()});
  return s;
}

Table Table::take(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) cols.push_back(c.take(rows));
  return Table(std::move(cols));
}

Table Table::select(std::span<const std::string> names) const {
  std::vector<Column> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(column(n));
  return Table(std::move(cols));
}

Table Table::drop(std::span<const std::string> names) const {
  std::vector<Column> cols;
  for (const auto& c : columns_) {
    bool dropped = false;
    for (const auto& n : names) dropped = dropped || n == c.name();
    if (!dropped) cols.push_back(c);
  }
  return Table(std::move(cols));
}

Table Table::with_column(Column column) const {
  std::vector<Column> cols = columns_;
  if (auto pos = position(column.name())) {
    cols[*pos] = std::move(column);
  } else {
    cols.push_back(std::move(column));
  }
  return Table(std::move(cols));
}

Table Table::empty_like() const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) cols.push_back(c.empty_like());
  return Table(std::move(cols));
}

std::size_t Table::footprint_bytes() const {
  std::size_t total = sizeof(Table) + columns_.capacity() * sizeof(Column) - columns_.size() * sizeof(Column);
  for (const auto& c : columns_) total += c.footprint_bytes();
  return total;
}

Table Table::concat(std::span<const Table> parts) {
  if (parts.empty()) return Table{};
  const Schema schema = parts.front().schema();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.schema() != schema) throw Error("cannot concatenate tables with different schemas");
    total += p.num_rows();
  }
  std::vector<Column> cols;
  cols.reserve(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    Column c = parts.front().column(j).empty_like();
    c.reserve(total);
    for (const auto& p : parts) {
      const Column& src = p.column(j);
      for (std::size_t i = 0; i < src.size(); ++i) c.push_from(src, i);
    }
    cols.push_back(std::move(c));
  }
  return Table(std::move(cols));
}

}  // namespace cubble
