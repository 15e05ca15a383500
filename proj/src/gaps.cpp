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

#include "cubble/gaps.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "cubble/error.hpp"

namespace cubble {

namespace {

struct SiteGaps {
  std::size_t site;                  // sidecar row
  std::vector<std::int64_t> missing;  // absent index counts, ascending
};

std::vector<SiteGaps> find_gaps(const TemporalTable& t) {
  const std::int64_t step = infer_interval(t).interval.step;
  const Column& index = t.index_column();
  std::vector<SiteGaps> out;
  const auto groups = t.rows_by_site();
  for (std::size_t s = 0; s < groups.size(); ++s) {
    std::vector<std::int64_t> have;
    have.reserve(groups[s].size());
    for (auto r : groups[s]) have.push_back(index.i64(r));
    std::sort(have.begin(), have.end());
    SiteGaps g{s, {}};
    if (!have.empty()) {
      auto it = have.begin();
      for (std::int64_t v = have.front(); v <= have.back(); v += step) {
        while (it != have.end() && *it < v) ++it;
        if (it == have.end() || *it != v) g.missing.push_back(v);
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// Sidecar rows ordered by key value.
std::vector<std::size_t> sites_by_key_value(const Column& keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return compare_scalars(keys.at(a), keys.at(b)) < 0; });
  return order;
}

Scalar coerce_fill(const Column& col, const Scalar& v) {
  if (is_missing(v)) return v;
  if (col.kind() == Kind::Float64 && std::holds_alternative<std::int64_t>(v))
    return static_cast<double>(std::get<std::int64_t>(v));
  const bool time_ok = col.kind() != Kind::Time ||
                       (std::holds_alternative<TimePoint>(v) && std::get<TimePoint>(v).kind == col.time_kind());
  if (col.kind() == Kind::Nested || kind_of(v) != col.kind() || !time_ok)
    throw Error("fill value of kind " + std::string(kind_name(kind_of(v))) + " does not fit column '" + col.name() +
                "' (" + std::string(kind_name(col.kind())) + ")");
  return v;
}

}  // namespace

std::string interval_label(const Interval& interval) {
  if (interval.kind == TimeKind::DateTime && interval.step != 0) {
    for (auto [secs, unit] : {std::pair{86400, "D"}, {3600, "h"}, {60, "m"}})
      if (interval.step % secs == 0) return std::to_string(interval.step / secs) + unit;
  }
  return std::to_string(interval.step) + std::string(time_unit_suffix(interval.kind));
}

IntervalEstimate infer_interval(const TemporalTable& t) {
  const auto step = infer_step(t.key_column(), t.index_column());
  if (!step) return {{t.meta().index_kind, 1}, true};
  return {{t.meta().index_kind, *step}, false};
}

Table has_gaps(const TemporalTable& t) {
  const Column& keys = t.sidecar().column(t.meta().key);
  std::vector<Scalar> flags;
  for (const auto& g : find_gaps(t)) flags.emplace_back(!g.missing.empty());
  return Table({keys, Column::from_scalars(".gaps", Kind::Bool, flags)});
}

Table scan_gaps(const TemporalTable& t) {
  const Column& keys = t.sidecar().column(t.meta().key);
  const auto gaps = find_gaps(t);
  Column key_out = keys.empty_like();
  Column index_out(t.meta().index, Kind::Time, t.meta().index_kind);
  for (auto s : sites_by_key_value(keys)) {
    for (auto v : gaps[s].missing) {
      key_out.push_from(keys, s);
      index_out.push(TimePoint{t.meta().index_kind, v});
    }
  }
  return Table({std::move(key_out), std::move(index_out)});
}

TemporalTable fill_gaps(const TemporalTable& t, const GapFill& fill) {
  const Table& long_table = t.table();
  const Table& sidecar = t.sidecar();
  const auto& meta = t.meta();

  // Resolve the value each non-key, non-index column takes on inserted rows.
  std::vector<std::optional<Scalar>> fill_values(long_table.num_columns());
  std::vector<const Column*> unfolded(long_table.num_columns(), nullptr);
  for (const auto& [name, v] : fill.per_column)
    if (!long_table.contains(name)) throw Error("fill value given for unknown column '" + name + "'");
  for (std::size_t j = 2; j < long_table.num_columns(); ++j) {
    const Column& col = long_table.column(j);
    if (const Column* sc = sidecar.find(col.name())) {
      unfolded[j] = sc;
      continue;
    }
    if (auto it = fill.per_column.find(col.name()); it != fill.per_column.end()) {
      fill_values[j] = coerce_fill(col, it->second);
    } else if (fill.all) {
      fill_values[j] = coerce_fill(col, *fill.all);
    }
  }

  const auto gaps = find_gaps(t);
  const auto groups = t.rows_by_site();
  const Column& index = t.index_column();
  std::vector<Column> cols;
  for (const auto& c : long_table.columns()) cols.push_back(c.empty_like());
  const Column& skeys = sidecar.column(meta.key);

  for (std::size_t s = 0; s < groups.size(); ++s) {
    std::vector<std::size_t> rows = groups[s];
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) { return index.i64(a) < index.i64(b); });
    const auto& missing = gaps[s].missing;
    std::size_t ri = 0, mi = 0;
    while (ri < rows.size() || mi < missing.size()) {
      const bool take_existing = mi == missing.size() || (ri < rows.size() && index.i64(rows[ri]) < missing[mi]);
      if (take_existing) {
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_from(long_table.column(j), rows[ri]);
        ++ri;
      } else {
        cols[0].push_from(skeys, s);
        cols[1].push(TimePoint{meta.index_kind, missing[mi]});
        for (std::size_t j = 2; j < cols.size(); ++j) {
          if (unfolded[j]) {
            cols[j].push_from(*unfolded[j], s);
          } else if (fill_values[j]) {
            cols[j].push(*fill_values[j]);
          } else {
            cols[j].push_missing();
          }
        }
        ++mi;
      }
    }
  }
  return TemporalTable::create(Table(std::move(cols)), sidecar, meta);
}

}  // namespace cubble
