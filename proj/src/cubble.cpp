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

#include "cubble/cubble.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "cubble/error.hpp"

namespace cubble {

namespace {

using KeyLookup = std::unordered_map<std::string, std::size_t>;

KeyLookup lookup_of(const Column& keys) {
  KeyLookup out;
  out.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) out.emplace(keys.cell_text(i), i);
  return out;
}

void require_column(const Table& t, std::string_view name, std::string_view role) {
  if (!t.contains(name))
    throw Error(std::string(role) + " table has no column '" + std::string(name) + "'");
}

void check_unique_keys(const Column& keys, std::string_view what) {
  std::unordered_set<std::string> seen;
  seen.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys.is_missing(i)) throw Error(std::string(what) + ": key column '" + keys.name() + "' has a missing value");
    if (!seen.insert(keys.cell_text(i)).second)
      throw Error(std::string(what) + ": duplicate key '" + keys.cell_text(i) + "'");
  }
}

void check_coords(const Table& t, const CubbleMeta& meta) {
  for (const auto* name : {&meta.coords.x, &meta.coords.y}) {
    const Column& c = t.column(*name);
    if (!c.is_numeric())
      throw Error("coordinate column '" + *name + "' must be numeric, found " + std::string(kind_name(c.kind())));
  }
  if (meta.coord_mode != CoordMode::Geographic) return;
  const Column& x = t.column(meta.coords.x);
  const Column& y = t.column(meta.coords.y);
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    if (auto v = x.numeric(i); v && (*v < -180.0 || *v > 180.0))
      throw Error("longitude " + format_double(*v) + " in '" + meta.coords.x + "' outside [-180, 180]");
    if (auto v = y.numeric(i); v && (*v < -90.0 || *v > 90.0))
      throw Error("latitude " + format_double(*v) + " in '" + meta.coords.y + "' outside [-90, 90]");
  }
}

void check_meta(const CubbleMeta& meta) {
  if (meta.key.empty() || meta.index.empty()) throw Error("key and index names must be non-empty");
  if (meta.key == meta.index) throw Error("key and index must be different columns");
  if (meta.coords.x == meta.coords.y) throw Error("coordinate columns must be distinct");
  for (const auto* n : {&meta.key, &meta.index, &meta.coords.x, &meta.coords.y})
    if (*n == kTsColumn) throw Error("'ts' is reserved for the nested column");
  if (meta.interval && *meta.interval < 1) throw Error("interval must be a positive integer");
}

std::int64_t gcd_of_diffs(std::span<const std::int64_t> sorted, std::int64_t g) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    std::int64_t d = sorted[i] - sorted[i - 1];
    if (d > 0) g = std::gcd(g, d);
  }
  return g;
}

std::optional<std::int64_t> step_of_cells(const Column& ts) {
  std::int64_t g = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Column& idx = ts.nested(i).column(0);
    std::vector<std::int64_t> v(idx.size());
    for (std::size_t r = 0; r < v.size(); ++r) v[r] = idx.i64(r);
    g = gcd_of_diffs(v, g);
  }
  if (g == 0) return std::nullopt;
  return g;
}

/// Concatenates the columns [from, end) of a list of same-schema tables.
std::vector<Column> concat_columns(const std::vector<const Table*>& parts, const Schema& schema,
                                   std::size_t from, std::size_t total_rows) {
  std::vector<Column> cols;
  for (std::size_t j = from; j < schema.size(); ++j) {
    Column c(schema[j].name, schema[j].kind, schema[j].time_kind);
    c.reserve(total_rows);
    for (const Table* p : parts) {
      const Column& src = p->column(j);
      for (std::size_t r = 0; r < src.size(); ++r) c.push_from(src, r);
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

bool cells_equal(const Column& c, std::size_t i, std::size_t j) {
  if (c.is_missing(i) || c.is_missing(j)) return c.is_missing(i) == c.is_missing(j);
  switch (c.kind()) {
    case Kind::Float64: return c.f64(i) == c.f64(j);
    case Kind::Int64:
    case Kind::Time: return c.i64(i) == c.i64(j);
    case Kind::Text: return c.text(i) == c.text(j);
    case Kind::Bool: return c.boolean(i) == c.boolean(j);
    case Kind::Nested: return c.nested(i) == c.nested(j);
  }
  return false;
}

}  // namespace

std::string_view coord_mode_name(CoordMode mode) {
  return mode == CoordMode::Geographic ? "geographic" : "projected";
}

std::optional<CoordMode> parse_coord_mode(std::string_view name) {
  if (name == "geographic") return CoordMode::Geographic;
  if (name == "projected") return CoordMode::Projected;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Faces

SpatialTable SpatialTable::create(Table table, CubbleMeta meta, std::optional<Schema> expected_ts) {
  check_meta(meta);
  require_column(table, meta.key, "spatial");
  require_column(table, meta.coords.x, "spatial");
  require_column(table, meta.coords.y, "spatial");
  require_column(table, kTsColumn, "spatial");
  const Column& ts = table.column(kTsColumn);
  if (ts.kind() != Kind::Nested) throw Error("'ts' must be a nested column");
  if (*table.position(kTsColumn) != table.num_columns() - 1) throw Error("'ts' must be the last column");
  if (table.column(meta.key).kind() == Kind::Nested) throw Error("key column cannot be nested");
  check_unique_keys(table.column(meta.key), "spatial face");
  check_coords(table, meta);

  Schema ts_schema;
  if (expected_ts) {
    ts_schema = *expected_ts;
    if (ts_schema.empty() || ts_schema.front().name != meta.index)
      throw Error("ts tables must start with the index column '" + meta.index + "'");
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts.is_missing(i)) throw Error("site " + table.column(meta.key).cell_text(i) + " has no ts table");
    const Table& cell = ts.nested(i);
    if (i == 0 && !expected_ts) {
      ts_schema = cell.schema();
      if (ts_schema.empty() || ts_schema.front().name != meta.index)
        throw Error("ts tables must start with the index column '" + meta.index + "'");
      if (ts_schema.front().kind != Kind::Time || ts_schema.front().time_kind != meta.index_kind)
        throw Error("index column '" + meta.index + "' must hold " +
                    std::string(time_kind_name(meta.index_kind)) + " values");
    } else if (cell.schema() != ts_schema) {
      throw Error("ts schema differs for site " + table.column(meta.key).cell_text(i));
    }
    const Column& idx = cell.column(0);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (idx.is_missing(r))
        throw Error("missing index value for site " + table.column(meta.key).cell_text(i));
      if (r > 0 && idx.i64(r) <= idx.i64(r - 1))
        throw Error("index values must be strictly increasing within site " +
                    table.column(meta.key).cell_text(i));
    }
  }
  if (ts_schema.empty()) ts_schema = {Field{meta.index, Kind::Time, meta.index_kind}};
  if (ts_schema.front().kind != Kind::Time || ts_schema.front().time_kind != meta.index_kind)
    throw Error("index column '" + meta.index + "' must hold " + std::string(time_kind_name(meta.index_kind)) +
                " values");
  return SpatialTable(std::move(table), std::move(meta), std::move(ts_schema));
}

Table SpatialTable::spatial_columns() const {
  const std::string ts_name(kTsColumn);
  return table_.drop(std::span<const std::string>(&ts_name, 1));
}

TemporalTable TemporalTable::create(Table table, Table sidecar, CubbleMeta meta) {
  check_meta(meta);
  if (table.num_columns() < 2 || table.column(0).name() != meta.key || table.column(1).name() != meta.index)
    throw Error("temporal face must start with the key and index columns");
  const Column& idx = table.column(1);
  if (idx.kind() != Kind::Time || idx.time_kind() != meta.index_kind)
    throw Error("index column '" + meta.index + "' must hold " + std::string(time_kind_name(meta.index_kind)) +
                " values");
  require_column(sidecar, meta.key, "sidecar");
  const Column& skey = sidecar.column(meta.key);
  if (!skey.same_type(table.column(0))) throw Error("sidecar and long table key columns differ in type");
  check_unique_keys(skey, "sidecar");

  TemporalTable t(std::move(table), std::move(sidecar), std::move(meta));
  auto groups = t.rows_by_site();  // throws on keys absent from the sidecar
  const Column& index = t.index_column();
  for (auto& g : groups) {
    std::vector<std::int64_t> v;
    v.reserve(g.size());
    for (auto r : g) {
      if (index.is_missing(r)) throw Error("missing index value in temporal face");
      v.push_back(index.i64(r));
    }
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
      throw Error("duplicate (key, index) pair in temporal face");
  }
  return t;
}

std::vector<std::vector<std::size_t>> TemporalTable::rows_by_site() const {
  const KeyLookup pos = lookup_of(sidecar_.column(meta_.key));
  std::vector<std::vector<std::size_t>> groups(sidecar_.num_rows());
  const Column& keys = key_column();
  for (std::size_t r = 0; r < keys.size(); ++r) {
    auto it = pos.find(keys.cell_text(r));
    if (it == pos.end()) throw Error("key '" + keys.cell_text(r) + "' has no row in the spatial sidecar");
    groups[it->second].push_back(r);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Creation

MadeCubble make_cubble(const Table& spatial, const Table& temporal, std::string_view key,
                       std::string_view index, const CoordNames& coords, const MakeOptions& options) {
  const KeyMapping by = options.by.value_or(KeyMapping{std::string(key), std::string(key)});
  require_column(spatial, by.spatial, "spatial");
  require_column(spatial, coords.x, "spatial");
  require_column(spatial, coords.y, "spatial");
  require_column(temporal, by.temporal, "temporal");
  require_column(temporal, index, "temporal");

  const Column& skeys = spatial.column(by.spatial);
  const Column& tkeys = temporal.column(by.temporal);
  const Column& tindex = temporal.column(index);
  check_unique_keys(skeys, "spatial table");
  if (tindex.kind() != Kind::Time)
    throw Error("index column '" + std::string(index) + "' must hold time values, found " +
                std::string(kind_name(tindex.kind())));

  CubbleMeta meta{by.spatial, std::string(index), coords, options.coord_mode, tindex.time_kind(), std::nullopt};
  check_meta(meta);
  for (const auto& c : spatial.columns())
    if (c.name() == kTsColumn) throw Error("spatial table already has a 'ts' column");

  // Group temporal rows by key text, checking (key, index) uniqueness.
  std::unordered_map<std::string, std::vector<std::size_t>> by_key;
  for (std::size_t r = 0; r < temporal.num_rows(); ++r) {
    if (tkeys.is_missing(r)) throw Error("temporal key column '" + by.temporal + "' has a missing value");
    if (tindex.is_missing(r)) throw Error("temporal index column '" + std::string(index) + "' has a missing value");
    by_key[tkeys.cell_text(r)].push_back(r);
  }
  for (auto& [k, rows] : by_key) {
    std::stable_sort(rows.begin(), rows.end(),
                     [&](std::size_t a, std::size_t b) { return tindex.i64(a) < tindex.i64(b); });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (tindex.i64(rows[i]) == tindex.i64(rows[i - 1]))
        throw Error("duplicate (key, index) in temporal table: (" + k + ", " +
                    format_time(tindex.time(rows[i])) + ")");
  }

  KeyReport report = check_key(spatial, temporal, by);
  std::vector<std::size_t> site_rows;
  for (std::size_t i = 0; i < skeys.size(); ++i)
    if (by_key.contains(skeys.cell_text(i))) site_rows.push_back(i);
  if (site_rows.empty()) throw Error("spatial and temporal tables share no key values");
  const bool partial = site_rows.size() != skeys.size() || site_rows.size() != by_key.size();
  if (partial && options.strict)
    throw Error("some keys exist on only one side; run check_key for details");

  // Temporal columns: index first, then the rest in input order.
  std::vector<std::string> ts_names{std::string(index)};
  for (const auto& c : temporal.columns())
    if (c.name() != by.temporal && c.name() != index) ts_names.push_back(c.name());
  const Table temporal_vars = temporal.select(ts_names);

  std::vector<TablePtr> cells;
  cells.reserve(site_rows.size());
  for (auto s : site_rows) cells.push_back(std::make_shared<const Table>(temporal_vars.take(by_key.at(skeys.cell_text(s)))));

  // Spatial columns: key first, then the rest in input order.
  std::vector<std::string> sp_names{by.spatial};
  for (const auto& c : spatial.columns())
    if (c.name() != by.spatial) sp_names.push_back(c.name());
  Table sp = spatial.select(sp_names).take(site_rows);
  Table full = sp.with_column(Column::of_tables(std::string(kTsColumn), std::move(cells)));
  meta.interval = step_of_cells(full.column(kTsColumn));
  return {SpatialTable::create(std::move(full), std::move(meta)), std::move(report)};
}

SpatialTable from_flat(const Table& flat, std::string_view key, std::string_view index,
                       const CoordNames& coords, CoordMode mode) {
  for (auto name : {key, index, std::string_view(coords.x), std::string_view(coords.y)})
    require_column(flat, name, "flat");
  const Column& keys = flat.column(key);

  std::vector<std::vector<std::size_t>> groups;
  std::unordered_map<std::string, std::size_t> group_of;
  for (std::size_t r = 0; r < flat.num_rows(); ++r) {
    if (keys.is_missing(r)) throw Error("flat key column '" + std::string(key) + "' has a missing value");
    auto [it, fresh] = group_of.emplace(keys.cell_text(r), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(r);
  }

  auto constant_within_groups = [&](const Column& c, std::string* offending_key) {
    for (const auto& g : groups)
      for (std::size_t i = 1; i < g.size(); ++i)
        if (!cells_equal(c, g[0], g[i])) {
          if (offending_key) *offending_key = keys.cell_text(g[0]);
          return false;
        }
    return true;
  };

  std::vector<std::string> spatial_names{std::string(key)}, temporal_names{std::string(key), std::string(index)};
  for (const auto& c : flat.columns()) {
    if (c.name() == key || c.name() == index) continue;
    std::string bad;
    const bool constant = constant_within_groups(c, &bad);
    if (c.name() == coords.x || c.name() == coords.y) {
      if (!constant) throw Error("coordinate column '" + c.name() + "' varies within key '" + bad + "'");
      spatial_names.push_back(c.name());
    } else if (constant) {
      spatial_names.push_back(c.name());
    } else {
      temporal_names.push_back(c.name());
    }
  }

  std::vector<std::size_t> first_rows;
  first_rows.reserve(groups.size());
  for (const auto& g : groups) first_rows.push_back(g.front());
  Table spatial = flat.select(spatial_names).take(first_rows);
  Table temporal = flat.select(temporal_names);
  MakeOptions opts;
  opts.coord_mode = mode;
  opts.strict = true;
  return make_cubble(spatial, temporal, key, index, coords, opts).cubble;
}

// ---------------------------------------------------------------------------
// Pivots

TemporalTable face_temporal(const SpatialTable& s) {
  const Column& ts = s.ts_column();
  const Column& keys = s.key_column();
  std::vector<const Table*> parts;
  parts.reserve(ts.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    parts.push_back(&ts.nested(i));
    total += parts.back()->num_rows();
  }

  Column key_col = keys.empty_like();
  key_col.reserve(total);
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t r = 0; r < parts[i]->num_rows(); ++r) key_col.push_from(keys, i);

  std::vector<Column> cols;
  cols.push_back(std::move(key_col));
  for (auto& c : concat_columns(parts, s.ts_schema(), 0, total)) cols.push_back(std::move(c));
  return TemporalTable::create(Table(std::move(cols)), s.spatial_columns(), s.meta());
}

SpatialTable face_spatial(const TemporalTable& t) {
  const Table& sidecar = t.sidecar();
  const Table& long_table = t.table();

  // Unfolded columns duplicate sidecar values and are dropped before nesting.
  std::vector<std::string> nested_names;
  for (std::size_t j = 1; j < long_table.num_columns(); ++j) {
    const auto& name = long_table.column(j).name();
    if (j >= 2 && sidecar.contains(name)) continue;
    nested_names.push_back(name);
  }
  const Table nested_vars = long_table.select(nested_names);
  const Column& index = t.index_column();

  auto groups = t.rows_by_site();
  std::vector<TablePtr> cells;
  cells.reserve(groups.size());
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) { return index.i64(a) < index.i64(b); });
    cells.push_back(std::make_shared<const Table>(nested_vars.take(g)));
  }
  Table full = sidecar.with_column(Column::of_tables(std::string(kTsColumn), std::move(cells)));
  return SpatialTable::create(std::move(full), t.meta(), nested_vars.schema());
}

TemporalTable unfold(const TemporalTable& t, std::span<const std::string> vars) {
  if (vars.empty()) return t;
  const Table& sidecar = t.sidecar();
  const KeyLookup pos = lookup_of(sidecar.column(t.meta().key));
  const Column& keys = t.key_column();
  std::vector<std::size_t> site_of_row(keys.size());
  for (std::size_t r = 0; r < keys.size(); ++r) site_of_row[r] = pos.at(keys.cell_text(r));

  Table out = t.table();
  for (const auto& v : vars) {
    if (!sidecar.contains(v)) throw Error("cannot unfold '" + v + "': not a spatial column");
    if (out.contains(v)) throw Error("cannot unfold '" + v + "': the long table already has that column");
    out = out.with_column(sidecar.column(v).take(site_of_row));
  }
  return TemporalTable::create(std::move(out), sidecar, t.meta());
}

const Table& spatial_of(const TemporalTable& t) { return t.sidecar(); }

Table flatten(const SpatialTable& s) {
  const Column& ts = s.ts_column();
  std::vector<const Table*> parts;
  std::vector<std::size_t> site_of_row;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    parts.push_back(&ts.nested(i));
    site_of_row.insert(site_of_row.end(), parts.back()->num_rows(), i);
  }
  std::vector<Column> cols;
  const Table spatial = s.spatial_columns();
  for (const auto& c : spatial.columns()) cols.push_back(c.take(site_of_row));
  for (auto& c : concat_columns(parts, s.ts_schema(), 0, site_of_row.size())) cols.push_back(std::move(c));
  return Table(std::move(cols));
}

SpatialTable combine_sites(std::span<const SpatialTable> parts) {
  if (parts.empty()) throw Error("combine_sites needs at least one cubble");
  if (parts.size() == 1) return parts.front();
  CubbleMeta meta = parts.front().meta();
  const Schema schema = parts.front().table().schema();
  const Schema ts_schema = parts.front().ts_schema();
  std::vector<Table> tables;
  std::unordered_set<std::string> seen;
  for (const auto& p : parts) {
    CubbleMeta m = p.meta();
    m.interval = meta.interval;
    if (!(m == meta)) throw Error("combine_sites: cubbles have different key/index/coords metadata");
    if (p.table().schema() != schema || (p.num_sites() > 0 && p.ts_schema() != ts_schema))
      throw Error("combine_sites: cubbles have different schemas");
    const Column& keys = p.key_column();
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (!seen.insert(keys.cell_text(i)).second)
        throw Error("combine_sites: duplicate key '" + keys.cell_text(i) +
                    "' across parts; a cubble requires unique IDs");
    tables.push_back(p.table());
  }
  Table all = Table::concat(tables);
  meta.interval = step_of_cells(all.column(kTsColumn));
  return SpatialTable::create(std::move(all), std::move(meta), ts_schema);
}

Table key_data(const SpatialTable& c) { return Table({c.key_column()}); }
Table key_data(const TemporalTable& c) { return Table({c.sidecar().column(c.meta().key)}); }

std::size_t footprint_bytes(const SpatialTable& s) { return sizeof(CubbleMeta) + s.table().footprint_bytes(); }
std::size_t footprint_bytes(const Table& t) { return t.footprint_bytes(); }

std::optional<std::int64_t> infer_step_nested(const Column& ts) { return step_of_cells(ts); }

std::optional<std::int64_t> infer_step(const Column& key, const Column& index) {
  std::unordered_map<std::string, std::vector<std::int64_t>> series;
  for (std::size_t r = 0; r < key.size(); ++r)
    if (!index.is_missing(r)) series[key.cell_text(r)].push_back(index.i64(r));
  std::int64_t g = 0;
  for (auto& [k, v] : series) {
    std::sort(v.begin(), v.end());
    g = gcd_of_diffs(v, g);
  }
  if (g == 0) return std::nullopt;
  return g;
}

}  // namespace cubble
