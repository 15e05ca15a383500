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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

#include "cubble/cubble.hpp"
#include "cubble/error.hpp"

namespace cubble {

namespace {

std::vector<std::size_t> matching_rows(const Table& t, const RowPredicate& keep) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < t.num_rows(); ++r)
    if (keep(RowView(t, r))) rows.push_back(r);
  return rows;
}

Column evaluate(const Table& t, std::string name, const RowExpression& expr) {
  std::vector<Scalar> values;
  values.reserve(t.num_rows());
  for (std::size_t r = 0; r < t.num_rows(); ++r) values.push_back(expr(RowView(t, r)));
  Kind kind = Kind::Float64;
  TimeKind tk = TimeKind::Date;
  for (const auto& v : values) {
    if (is_missing(v)) continue;
    kind = kind_of(v);
    if (kind == Kind::Time) tk = std::get<TimePoint>(v).kind;
    break;
  }
  return Column::from_scalars(std::move(name), kind, values, tk);
}

std::vector<std::string> keep_with_protected(const Table& t, std::span<const std::string> names,
                                             std::initializer_list<std::string_view> protected_names) {
  std::unordered_set<std::string_view> wanted(protected_names.begin(), protected_names.end());
  for (const auto& n : names) {
    if (!t.contains(n)) throw Error("unknown column '" + n + "'");
    wanted.insert(n);
  }
  std::vector<std::string> out;
  for (const auto& c : t.columns())
    if (wanted.contains(c.name())) out.push_back(c.name());
  return out;
}

Scalar bucket_of(TimePoint tp, Bucket bucket, int anchor_year) {
  switch (bucket) {
    case Bucket::Date: return to_date(tp);
    case Bucket::YearWeek: return to_year_week(tp);
    case Bucket::YearMonth: return to_year_month(tp);
    case Bucket::YearQuarter: return to_year_quarter(tp);
    case Bucket::Year: return make_year_month(civil_of(tp).year, 1);
    case Bucket::Month: return make_year_month(anchor_year, civil_of(tp).month);
  }
  return Missing{};
}

TimeKind bucket_kind(Bucket bucket) {
  switch (bucket) {
    case Bucket::Date: return TimeKind::Date;
    case Bucket::YearWeek: return TimeKind::YearWeek;
    case Bucket::YearQuarter: return TimeKind::YearQuarter;
    default: return TimeKind::YearMonth;
  }
}

}  // namespace

SpatialTable filter_rows(const SpatialTable& c, const RowPredicate& keep) {
  const auto rows = matching_rows(c.table(), keep);
  return SpatialTable::create(c.table().take(rows), c.meta(), c.ts_schema());
}

TemporalTable filter_rows(const TemporalTable& c, const RowPredicate& keep) {
  const auto rows = matching_rows(c.table(), keep);
  return TemporalTable::create(c.table().take(rows), c.sidecar(), c.meta());
}

SpatialTable select_cols(const SpatialTable& c, std::span<const std::string> names) {
  const auto& m = c.meta();
  auto keep = keep_with_protected(c.table(), names, {m.key, m.coords.x, m.coords.y, kTsColumn});
  return SpatialTable::create(c.table().select(keep), m, c.ts_schema());
}

TemporalTable select_cols(const TemporalTable& c, std::span<const std::string> names) {
  const auto& m = c.meta();
  auto keep = keep_with_protected(c.table(), names, {m.key, m.index});
  return TemporalTable::create(c.table().select(keep), c.sidecar(), m);
}

SpatialTable derive_col(const SpatialTable& c, std::string name, const RowExpression& expr) {
  const auto& m = c.meta();
  if (name == m.key || name == m.coords.x || name == m.coords.y || name == kTsColumn)
    throw Error("cannot overwrite protected column '" + name + "'");
  Column col = evaluate(c.table(), std::move(name), expr);
  // Keep ts last: rebuild column order around the new column.
  std::vector<Column> cols;
  bool replaced = false;
  for (const auto& existing : c.table().columns()) {
    if (existing.name() == kTsColumn) continue;
    if (existing.name() == col.name()) {
      cols.push_back(col);
      replaced = true;
    } else {
      cols.push_back(existing);
    }
  }
  if (!replaced) cols.push_back(col);
  cols.push_back(c.ts_column());
  return SpatialTable::create(Table(std::move(cols)), m, c.ts_schema());
}

TemporalTable derive_col(const TemporalTable& c, std::string name, const RowExpression& expr) {
  const auto& m = c.meta();
  if (name == m.key || name == m.index) throw Error("cannot overwrite protected column '" + name + "'");
  Column col = evaluate(c.table(), std::move(name), expr);
  return TemporalTable::create(c.table().with_column(std::move(col)), c.sidecar(), m);
}

std::string_view bucket_name(Bucket b) {
  switch (b) {
    case Bucket::Date: return "date";
    case Bucket::YearWeek: return "yearweek";
    case Bucket::YearMonth: return "yearmonth";
    case Bucket::YearQuarter: return "yearquarter";
    case Bucket::Year: return "year";
    case Bucket::Month: return "month";
  }
  return "yearmonth";
}

std::optional<Bucket> parse_bucket(std::string_view name) {
  for (auto b : {Bucket::Date, Bucket::YearWeek, Bucket::YearMonth, Bucket::YearQuarter, Bucket::Year, Bucket::Month})
    if (bucket_name(b) == name) return b;
  return std::nullopt;
}

std::string_view agg_name(AggFn f) {
  switch (f) {
    case AggFn::Mean: return "mean";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Sum: return "sum";
    case AggFn::Count: return "count";
    case AggFn::Var: return "var";
  }
  return "mean";
}

std::optional<AggFn> parse_agg(std::string_view name) {
  for (auto f : {AggFn::Mean, AggFn::Min, AggFn::Max, AggFn::Sum, AggFn::Count, AggFn::Var})
    if (agg_name(f) == name) return f;
  return std::nullopt;
}

Scalar aggregate(AggFn fn, std::span<const double> values) {
  const std::size_t n = values.size();
  if (fn == AggFn::Count) return static_cast<std::int64_t>(n);
  if (n == 0) return Missing{};
  double sum = 0.0;
  for (double v : values) sum += v;
  switch (fn) {
    case AggFn::Sum: return sum;
    case AggFn::Mean: return sum / static_cast<double>(n);
    case AggFn::Min: return *std::min_element(values.begin(), values.end());
    case AggFn::Max: return *std::max_element(values.begin(), values.end());
    case AggFn::Var: {
      if (n < 2) return Missing{};
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      return ss / static_cast<double>(n - 1);
    }
    case AggFn::Count: break;
  }
  return Missing{};
}

TemporalTable summarise_by(const TemporalTable& t, Bucket bucket, std::span<const Aggregation> aggs) {
  const auto& meta = t.meta();
  const Table& long_table = t.table();
  const std::string index_name(bucket_name(bucket));
  if (index_name == meta.key) throw Error("bucket name '" + index_name + "' collides with the key column");
  std::unordered_set<std::string> outputs{meta.key, index_name};
  for (const auto& a : aggs) {
    const Column& c = long_table.column(a.column);
    if (a.fn != AggFn::Count && !c.is_numeric())
      throw Error("cannot aggregate non-numeric column '" + a.column + "' with " + std::string(agg_name(a.fn)));
    if (!outputs.insert(a.output).second) throw Error("duplicate output column '" + a.output + "'");
  }

  const Column& index = t.index_column();
  int anchor_year = 0;
  if (bucket == Bucket::Month) {
    anchor_year = std::numeric_limits<int>::max();
    for (std::size_t r = 0; r < index.size(); ++r) anchor_year = std::min(anchor_year, civil_of(index.time(r)).year);
  }

  Column key_out = t.key_column().empty_like();
  Column index_out(index_name, Kind::Time, bucket_kind(bucket));
  std::vector<Column> agg_out;
  for (const auto& a : aggs) agg_out.emplace_back(a.output, a.fn == AggFn::Count ? Kind::Int64 : Kind::Float64);

  for (const auto& rows : t.rows_by_site()) {
    std::map<std::int64_t, std::vector<std::size_t>> groups;
    for (auto r : rows) groups[std::get<TimePoint>(bucket_of(index.time(r), bucket, anchor_year)).count].push_back(r);
    for (const auto& [b, members] : groups) {
      key_out.push_from(t.key_column(), members.front());
      index_out.push(TimePoint{bucket_kind(bucket), b});
      for (std::size_t k = 0; k < aggs.size(); ++k) {
        const Column& src = long_table.column(aggs[k].column);
        std::vector<double> vals;
        vals.reserve(members.size());
        for (auto r : members) {
          if (src.is_missing(r)) continue;
          vals.push_back(src.is_numeric() ? *src.numeric(r) : 0.0);
        }
        agg_out[k].push(aggregate(aggs[k].fn, vals));
      }
    }
  }

  CubbleMeta out_meta = meta;
  out_meta.index = index_name;
  out_meta.index_kind = bucket_kind(bucket);
  out_meta.interval = infer_step(key_out, index_out);
  std::vector<Column> cols{std::move(key_out), std::move(index_out)};
  for (auto& c : agg_out) cols.push_back(std::move(c));
  return TemporalTable::create(Table(std::move(cols)), t.sidecar(), std::move(out_meta));
}

}  // namespace cubble
