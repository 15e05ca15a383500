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

#include "random_cubble.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>

namespace cubble::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Field random_field(std::mt19937_64& rng, const std::string& name) {
  switch (pick(rng, 0, 4)) {
    case 0: return {name, Kind::Float64};
    case 1: return {name, Kind::Int64};
    case 2: return {name, Kind::Text};
    case 3: return {name, Kind::Bool};
    default: return {name, Kind::Time, static_cast<TimeKind>(pick(rng, 0, 4))};
  }
}

Scalar random_value(std::mt19937_64& rng, const Field& f) {
  switch (f.kind) {
    case Kind::Float64: {
      switch (pick(rng, 0, 9)) {
        case 0: return std::numeric_limits<double>::quiet_NaN();
        case 1: return -0.0;
        case 2: return std::numeric_limits<double>::infinity();
        case 3: return 1e-300 * static_cast<double>(pick(rng, 1, 9));
        default: return std::uniform_real_distribution<double>(-1e4, 1e4)(rng);
      }
    }
    case Kind::Int64:
      return chance(rng, 0.05) ? std::numeric_limits<std::int64_t>::min()
                               : std::uniform_int_distribution<std::int64_t>(-1000000, 1000000)(rng);
    case Kind::Text: return random_text(rng);
    case Kind::Bool: return chance(rng, 0.5);
    case Kind::Time: {
      // Keeps every kind inside the four-digit years its text form covers.
      std::int64_t span = 40'000;
      if (f.time_kind == TimeKind::DateTime) span = 4'000'000'000LL;
      if (f.time_kind == TimeKind::YearMonth) span = 20'000;
      if (f.time_kind == TimeKind::YearQuarter) span = 7'000;
      return TimePoint{f.time_kind, std::uniform_int_distribution<std::int64_t>(-span, span)(rng)};
    }
    case Kind::Nested: break;
  }
  return Missing{};
}

Column random_column(std::mt19937_64& rng, const Field& f, std::size_t n, double missing_rate) {
  Column c(f.name, f.kind, f.time_kind);
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (chance(rng, missing_rate)) {
      c.push_missing();
    } else {
      c.push(random_value(rng, f));
    }
  }
  return c;
}

}  // namespace

std::string random_text(std::mt19937_64& rng) {
  static const std::array<std::string, 14> pieces{
      "a", "Kingston (C)", ",", "\"", " lead", "trail ", "\n", "12", "3.5", "2020-01-01", "true", "NaN", "é", "-"};
  std::string s;
  const std::size_t n = pick(rng, 0, 3);
  for (std::size_t i = 0; i < n; ++i) s += pieces[pick(rng, 0, pieces.size() - 1)];
  return s;
}

SpatialTable random_cubble(std::mt19937_64& rng, const RandomCubbleOptions& o) {
  const std::size_t n_sites = pick(rng, o.min_sites, o.max_sites);
  const bool int_keys = chance(rng, 0.3);
  const TimeKind index_kind = static_cast<TimeKind>(pick(rng, 0, 4));

  std::vector<Column> spatial;
  {
    Column key("site", int_keys ? Kind::Int64 : Kind::Text);
    std::set<std::string> used;
    while (key.size() < n_sites) {
      const std::int64_t v = std::uniform_int_distribution<std::int64_t>(0, 1'000'000)(rng);
      const std::string text = (int_keys ? "" : (chance(rng, 0.5) ? "ASN" : "st ")) + std::to_string(v);
      if (!used.insert(text).second) continue;
      if (int_keys) {
        key.push(v);
      } else {
        key.push(text);
      }
    }
    spatial.push_back(std::move(key));
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n_sites; ++i) {
    xs.push_back(o.geographic ? std::uniform_real_distribution<double>(-180, 180)(rng)
                              : std::uniform_real_distribution<double>(-5e5, 5e5)(rng));
    ys.push_back(o.geographic ? std::uniform_real_distribution<double>(-90, 90)(rng)
                              : std::uniform_real_distribution<double>(-5e5, 5e5)(rng));
  }
  spatial.push_back(Column::of_doubles("x", xs));
  spatial.push_back(Column::of_doubles("y", ys));
  const std::size_t n_spatial_extra = pick(rng, 0, o.max_extra_columns);
  for (std::size_t k = 0; k < n_spatial_extra; ++k)
    spatial.push_back(random_column(rng, random_field(rng, "s" + std::to_string(k)), n_sites, o.missing_rate));

  Schema ts_schema{{"when", Kind::Time, index_kind}};
  const std::size_t n_temporal = pick(rng, 0, o.max_extra_columns);
  for (std::size_t k = 0; k < n_temporal; ++k) ts_schema.push_back(random_field(rng, "v" + std::to_string(k)));

  std::vector<TablePtr> cells;
  const std::int64_t base_step = index_kind == TimeKind::DateTime ? 3600 : 1;
  for (std::size_t i = 0; i < n_sites; ++i) {
    const std::size_t n = pick(rng, 0, o.max_points);
    std::vector<std::int64_t> counts;
    std::int64_t t = std::uniform_int_distribution<std::int64_t>(-500, 500)(rng) * base_step;
    for (std::size_t r = 0; r < n; ++r) {
      counts.push_back(t);
      t += base_step * static_cast<std::int64_t>(chance(rng, 0.1) ? pick(rng, 2, 5) : 1);
    }
    std::vector<Column> cols{Column::of_times("when", index_kind, counts)};
    for (std::size_t k = 1; k < ts_schema.size(); ++k) cols.push_back(random_column(rng, ts_schema[k], n, o.missing_rate));
    cells.push_back(std::make_shared<const Table>(std::move(cols)));
  }
  spatial.push_back(Column::of_tables("ts", std::move(cells)));

  CubbleMeta meta{"site", "when", {"x", "y"}, o.geographic ? CoordMode::Geographic : CoordMode::Projected, index_kind,
                  std::nullopt};
  meta.interval = infer_step_nested(spatial.back());
  return SpatialTable::create(Table(std::move(spatial)), meta, ts_schema);
}

TemporalTable random_gapped(std::mt19937_64& rng, std::size_t max_sites, std::size_t max_span, std::int64_t step) {
  const std::size_t n_sites = pick(rng, 1, max_sites);
  std::vector<std::string> keys;
  std::vector<double> xs, ys;
  Column key("id", Kind::Text);
  Column index("date", Kind::Time, TimeKind::Date);
  Column value("v", Kind::Float64);
  for (std::size_t i = 0; i < n_sites; ++i) {
    const std::string k = "k" + std::to_string(n_sites - i);  // not in sorted order
    keys.push_back(k);
    xs.push_back(static_cast<double>(i));
    ys.push_back(0.0);
    const std::int64_t start = std::uniform_int_distribution<std::int64_t>(-20, 20)(rng) * step;
    const std::size_t span = pick(rng, 1, max_span);
    const double keep = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    for (std::size_t r = 0; r < span; ++r) {
      if (r != 0 && r + 1 != span && !chance(rng, keep)) continue;
      key.push(k);
      index.push(TimePoint{TimeKind::Date, start + static_cast<std::int64_t>(r) * step});
      value.push(static_cast<double>(r));
    }
  }
  Table sidecar({Column::of_texts("id", keys), Column::of_doubles("long", xs), Column::of_doubles("lat", ys)});
  CubbleMeta meta{"id", "date", {"long", "lat"}, CoordMode::Geographic, TimeKind::Date, std::nullopt};
  Table long_table({key, index, value});
  meta.interval = infer_step(long_table.column(0), long_table.column(1));
  return TemporalTable::create(std::move(long_table), std::move(sidecar), meta);
}

}  // namespace cubble::testing
