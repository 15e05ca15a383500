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

#include "cubble/match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

#include "cubble/error.hpp"
#include "cubble/simd/kernels.hpp"

namespace cubble {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_lon_lat(LonLat p) {
  if (!std::isfinite(p.lon) || p.lon < -180.0 || p.lon > 180.0)
    throw Error("longitude " + format_double(p.lon) + " outside [-180, 180]");
  if (!std::isfinite(p.lat) || p.lat < -90.0 || p.lat > 90.0)
    throw Error("latitude " + format_double(p.lat) + " outside [-90, 90]");
}

struct Coords {
  std::vector<double> x;
  std::vector<double> y;
};

Coords coords_of_sites(const SpatialTable& s) {
  Coords c{s.table().column(s.meta().coords.x).to_doubles(), s.table().column(s.meta().coords.y).to_doubles()};
  for (std::size_t i = 0; i < c.x.size(); ++i)
    if (std::isnan(c.x[i]) || std::isnan(c.y[i]))
      throw Error("site " + s.key_column().cell_text(i) + " has missing coordinates");
  return c;
}

// ---------------------------------------------------------------------------
// Conforming columns from two sources onto one schema.

void push_conformed(Column& dst, const Column* src, std::size_t row) {
  if (src == nullptr || src->is_missing(row)) {
    dst.push_missing();
  } else if (dst.same_type(*src)) {
    dst.push_from(*src, row);
  } else if (dst.kind() == Kind::Float64 && src->kind() == Kind::Int64) {
    dst.push(static_cast<double>(src->i64(row)));
  } else if (dst.kind() == Kind::Text) {
    dst.push(src->cell_text(row));
  } else {
    throw Error("cannot combine column '" + dst.name() + "' of kinds " + std::string(kind_name(dst.kind())) +
                " and " + std::string(kind_name(src->kind())));
  }
}

bool numeric_kind(Kind k) { return k == Kind::Float64 || k == Kind::Int64; }

/// Target field for a column present in one or both sources.
Field unify(const std::string& name, const Field* a, const Field* b, bool is_key) {
  if (a && !b) return {name, a->kind, a->time_kind};
  if (b && !a) return {name, b->kind, b->time_kind};
  if (*a == *b) return {name, a->kind, a->time_kind};
  if (numeric_kind(a->kind) && numeric_kind(b->kind)) return {name, Kind::Float64, TimeKind::Date};
  if (is_key && a->kind != Kind::Nested && b->kind != Kind::Nested) return {name, Kind::Text, TimeKind::Date};
  throw Error("column '" + name + "' has kind " + std::string(kind_name(a->kind)) + " in one source and " +
              std::string(kind_name(b->kind)) + " in the other");
}

const Field* field_of(const Schema& schema, const std::string& name) {
  for (const auto& f : schema)
    if (f.name == name) return &f;
  return nullptr;
}

/// Merges two schemas: `a` in order, then the fields only `b` has. `rename`
/// maps a-names to the b-names they correspond to.
Schema union_schema(const Schema& a, const Schema& b, const std::map<std::string, std::string>& rename,
                    const std::string& key) {
  Schema out;
  for (const auto& f : a) {
    auto it = rename.find(f.name);
    out.push_back(unify(f.name, &f, field_of(b, it == rename.end() ? f.name : it->second), f.name == key));
  }
  for (const auto& f : b) {
    bool mapped = false;
    for (const auto& [from, to] : rename) mapped = mapped || to == f.name;
    if (mapped || field_of(a, f.name)) continue;
    out.push_back(f);
  }
  return out;
}

Column doubles_with_missing(std::string name, const std::vector<double>& v) {
  Column c(std::move(name), Kind::Float64);
  c.reserve(v.size());
  for (double x : v) std::isnan(x) ? c.push_missing() : c.push(x);
  return c;
}

/// Column lookup for one source with the other source's names mapped onto it.
struct SourceView {
  const Table* table;
  std::map<std::string, std::string> rename;  // target name -> source name

  const Column* find(const std::string& target) const {
    auto it = rename.find(target);
    return table->find(it == rename.end() ? target : it->second);
  }
};

Table conform_ts(const Table& cell, const SourceView& view, const Schema& schema) {
  SourceView v = view;
  v.table = &cell;
  std::vector<Column> cols;
  for (const auto& f : schema) {
    Column c(f.name, f.kind, f.time_kind);
    const Column* src = v.find(f.name);
    c.reserve(cell.num_rows());
    for (std::size_t r = 0; r < cell.num_rows(); ++r) push_conformed(c, src, r);
    cols.push_back(std::move(c));
  }
  return Table(std::move(cols));
}

std::vector<std::size_t> peak_positions(std::span<const double> v) {
  std::vector<std::uint8_t> mask(v.size());
  if (!v.empty()) simd::peak_mask(v, mask);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

}  // namespace

double great_circle_m(LonLat a, LonLat b) {
  check_lon_lat(a);
  check_lon_lat(b);
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = std::abs(b.lat - a.lat) * kDegToRad;
  const double dlambda = std::abs(b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + (std::cos(phi1) * std::cos(phi2)) * (s2 * s2);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

DistanceMatrix distance_matrix(const SpatialTable& df1, const SpatialTable& df2) {
  if (df1.meta().coord_mode != df2.meta().coord_mode)
    throw Error("cannot compare geographic and projected coordinates");
  const Coords a = coords_of_sites(df1);
  const Coords b = coords_of_sites(df2);
  DistanceMatrix m{a.x.size(), b.x.size(), std::vector<double>(a.x.size() * b.x.size())};
  if (df1.meta().coord_mode == CoordMode::Projected) {
    for (std::size_t i = 0; i < m.rows; ++i)
      simd::euclid_row(a.x[i], a.y[i], b.x, b.y, std::span<double>(m.values).subspan(i * m.cols, m.cols));
    return m;
  }
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      m.values[i * m.cols + j] = great_circle_m({a.x[i], a.y[i]}, {b.x[j], b.y[j]});
  return m;
}

Table SpatialMatch::as_table() const {
  std::vector<std::string> from, to;
  std::vector<double> dist;
  std::vector<std::int64_t> group;
  for (const auto& p : pairs) {
    from.push_back(p.from);
    to.push_back(p.to);
    dist.push_back(p.dist);
    group.push_back(p.group);
  }
  return Table({Column::of_texts("from", std::move(from)), Column::of_texts("to", std::move(to)),
                Column::of_doubles("dist", std::move(dist)), Column::of_ints("group", std::move(group))});
}

SpatialMatch match_spatial(const SpatialTable& df1, const SpatialTable& df2, const SpatialMatchOptions& options) {
  if (options.n_group < 1 || options.n_each < 1) throw Error("n_group and n_each must be at least 1");
  if (df1.num_sites() == 0 || df2.num_sites() == 0) throw Error("match_spatial needs sites on both sides");
  const DistanceMatrix m = distance_matrix(df1, df2);

  struct Candidate {
    double dist;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> all;
  all.reserve(m.values.size());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) all.push_back({m.at(i, j), i, j});
  const auto by_dist = [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  };
  std::sort(all.begin(), all.end(), by_dist);

  SpatialMatch out;
  std::vector<bool> used(m.rows, false);
  const Column& k1 = df1.key_column();
  const Column& k2 = df2.key_column();
  for (const auto& c : all) {
    if (out.n_groups == options.n_group) break;
    if (used[c.i]) continue;
    used[c.i] = true;
    ++out.n_groups;
    std::vector<Candidate> row;
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back({m.at(c.i, j), c.i, j});
    std::sort(row.begin(), row.end(), by_dist);
    row.resize(std::min(row.size(), options.n_each));
    for (const auto& r : row)
      out.pairs.push_back({static_cast<std::int64_t>(out.n_groups), r.i, r.j, k1.cell_text(r.i), k2.cell_text(r.j),
                           r.dist});
  }
  out.truncated = out.n_groups < options.n_group;
  return out;
}

std::vector<SpatialTable> match_spatial_cubbles(const SpatialTable& df1, const SpatialTable& df2,
                                                const SpatialMatch& match, const SourceLabels& labels) {
  const CubbleMeta& m1 = df1.meta();
  const CubbleMeta& m2 = df2.meta();
  if (m1.index_kind != m2.index_kind) throw Error("cannot combine cubbles with different index kinds");

  const Table s1 = df1.spatial_columns();
  const Table s2 = df2.spatial_columns();
  const std::map<std::string, std::string> spatial_rename{
      {m1.key, m2.key}, {m1.coords.x, m2.coords.x}, {m1.coords.y, m2.coords.y}};
  const std::map<std::string, std::string> ts_rename{{m1.index, m2.index}};
  SourceView v1{&s1, {}};
  SourceView v2{&s2, spatial_rename};
  SourceView t1{nullptr, {}};
  SourceView t2{nullptr, ts_rename};

  const Schema spatial = union_schema(s1.schema(), s2.schema(), spatial_rename, m1.key);
  for (const char* extra : {"type", "group", "dist"})
    if (field_of(spatial, extra)) throw Error("input already has a column named '" + std::string(extra) + "'");
  const Schema ts = union_schema(df1.ts_schema(), df2.ts_schema(), ts_rename, "");

  CubbleMeta meta = m1;
  std::vector<SpatialTable> out;
  std::size_t p = 0;
  while (p < match.pairs.size()) {
    const std::int64_t g = match.pairs[p].group;
    std::size_t end = p;
    while (end < match.pairs.size() && match.pairs[end].group == g) ++end;

    std::vector<Column> cols;
    for (const auto& f : spatial) cols.emplace_back(f.name, f.kind, f.time_kind);
    Column type("type", Kind::Text), group("group", Kind::Int64), dist("dist", Kind::Float64);
    std::vector<TablePtr> cells;

    const auto add_row = [&](const SourceView& view, const Table& src_ts, const SourceView& ts_view, std::size_t row,
                             const std::string& label, double d) {
      for (auto& c : cols) push_conformed(c, view.find(c.name()), row);
      type.push(label);
      group.push(g);
      dist.push(d);
      cells.push_back(std::make_shared<const Table>(conform_ts(src_ts, ts_view, ts)));
    };
    const auto& anchor = match.pairs[p];
    add_row(v1, df1.ts(anchor.from_site), t1, anchor.from_site, labels.df1, anchor.dist);
    for (std::size_t k = p; k < end; ++k)
      add_row(v2, df2.ts(match.pairs[k].to_site), t2, match.pairs[k].to_site, labels.df2, match.pairs[k].dist);

    cols.push_back(std::move(type));
    cols.push_back(std::move(group));
    cols.push_back(std::move(dist));
    cols.push_back(Column::of_tables(std::string(kTsColumn), std::move(cells)));
    Table table(std::move(cols));
    meta.interval = infer_step_nested(table.column(kTsColumn));
    out.push_back(SpatialTable::create(std::move(table), meta, ts));
    p = end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Temporal matching

std::vector<std::size_t> find_peaks(std::span<const double> v) { return peak_positions(v); }

std::int64_t match_peak(std::span<const double> x, std::span<const double> y, std::int64_t window) {
  if (window < 0) throw Error("peak window must be non-negative");
  if (x.size() != y.size()) throw Error("match_peak needs series of equal length");
  const std::size_t n = x.size();
  if (n < 3) return 0;
  const auto px = peak_positions(x);
  std::vector<std::uint8_t> ymask(n);
  simd::peak_mask(y, ymask);
  std::vector<std::size_t> below(n + 1, 0);  // y peaks in [0, i)
  for (std::size_t i = 0; i < n; ++i) below[i + 1] = below[i] + ymask[i];
  const auto w = static_cast<std::size_t>(std::min<std::int64_t>(window, static_cast<std::int64_t>(n)));
  std::int64_t count = 0;
  for (auto i : px) {
    const std::size_t lo = i >= w ? i - w : 0;
    const std::size_t hi = std::min(n - 1, i + w);
    if (below[hi + 1] > below[lo]) ++count;
  }
  return count;
}

namespace {

struct PairScore {
  std::size_t group;  // position in sorted group list
  std::size_t a;      // site row, first source
  std::size_t b;      // site row, second source
  double score;
};

struct TemporalPlan {
  std::vector<std::size_t> group_rep;         // representative site row per group
  std::vector<std::vector<std::size_t>> sites;  // site rows per group, row order
  std::vector<bool> first_source;             // per site row
  std::vector<PairScore> scores;
};

std::vector<double> values_of(const Table& ts, const std::string& var) {
  const Column& c = ts.column(var);
  if (!c.is_numeric()) throw Error("variable '" + var + "' is not numeric");
  return c.to_doubles();
}

TemporalPlan plan_temporal(const SpatialTable& data, const TemporalMatchOptions& o) {
  const Table& t = data.table();
  const Column& did = t.column(o.data_id);
  const Column& mid = t.column(o.match_id);
  const Schema schema = data.ts_schema();
  for (const auto* var : {&o.from_var, &o.to_var}) {
    bool found = false;
    for (std::size_t k = 1; k < schema.size(); ++k) found = found || schema[k].name == *var;
    if (!found) throw Error("temporal variable '" + *var + "' is not in the ts columns");
  }

  std::vector<std::string> sources;
  for (std::size_t r = 0; r < did.size(); ++r) {
    const std::string s = did.cell_text(r);
    if (std::find(sources.begin(), sources.end(), s) == sources.end()) sources.push_back(s);
  }
  if (sources.size() > 2) throw Error("data_id '" + o.data_id + "' has more than two sources");

  TemporalPlan plan;
  std::map<std::string, std::size_t> group_pos;
  std::vector<std::size_t> reps;
  for (std::size_t r = 0; r < mid.size(); ++r) {
    if (mid.is_missing(r)) throw Error("match_id '" + o.match_id + "' has a missing value");
    if (group_pos.emplace(mid.cell_text(r), reps.size()).second) reps.push_back(r);
  }
  std::vector<std::size_t> order(reps.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return compare_scalars(mid.at(reps[a]), mid.at(reps[b])) < 0;
  });
  std::vector<std::size_t> rank(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;

  plan.group_rep.resize(reps.size());
  plan.sites.resize(reps.size());
  for (std::size_t k = 0; k < reps.size(); ++k) plan.group_rep[rank[k]] = reps[k];
  plan.first_source.resize(t.num_rows());
  for (std::size_t r = 0; r < t.num_rows(); ++r) {
    plan.sites[rank[group_pos[mid.cell_text(r)]]].push_back(r);
    plan.first_source[r] = did.cell_text(r) == sources.front();
  }

  for (std::size_t g = 0; g < plan.sites.size(); ++g) {
    std::vector<std::size_t> as, bs;
    for (auto r : plan.sites[g]) (plan.first_source[r] ? as : bs).push_back(r);
    if (as.empty() || bs.empty())
      throw Error("group " + mid.cell_text(plan.group_rep[g]) + " lacks sites from both sources");
    for (auto a : as) {
      const Table& ta = data.ts(a);
      const std::vector<double> xa = values_of(ta, o.from_var);
      for (auto b : bs) {
        const Table& tb = data.ts(b);
        const std::vector<double> yb = values_of(tb, o.to_var);
        std::unordered_map<std::int64_t, std::size_t> pos_b;
        for (std::size_t r = 0; r < tb.num_rows(); ++r) pos_b.emplace(tb.column(0).i64(r), r);
        std::vector<double> x, y;
        for (std::size_t r = 0; r < ta.num_rows(); ++r) {
          auto it = pos_b.find(ta.column(0).i64(r));
          if (it == pos_b.end()) continue;
          x.push_back(xa[r]);
          y.push_back(yb[it->second]);
        }
        const double s = o.score ? o.score(x, y) : static_cast<double>(match_peak(x, y, o.window));
        plan.scores.push_back({g, a, b, s});
      }
    }
  }
  return plan;
}

}  // namespace

Table match_temporal(const SpatialTable& data, const TemporalMatchOptions& options) {
  const TemporalPlan plan = plan_temporal(data, options);
  const Column& mid = data.table().column(options.match_id);
  const Column& keys = data.key_column();
  Column group = mid.empty_like().renamed(options.match_id);
  std::vector<std::string> from, to;
  std::vector<double> res;
  for (const auto& s : plan.scores) {
    group.push_from(mid, plan.group_rep[s.group]);
    from.push_back(keys.cell_text(s.a));
    to.push_back(keys.cell_text(s.b));
    res.push_back(s.score);
  }
  return Table({std::move(group), Column::of_texts("from", std::move(from)), Column::of_texts("to", std::move(to)),
                Column::of_doubles("match_res", std::move(res))});
}

std::vector<SpatialTable> match_temporal_cubbles(const SpatialTable& data, const TemporalMatchOptions& options) {
  const TemporalPlan plan = plan_temporal(data, options);
  if (data.table().contains("match_res")) throw Error("input already has a column named 'match_res'");
  std::vector<double> best(data.num_sites(), -std::numeric_limits<double>::infinity());
  for (const auto& s : plan.scores) {
    best[s.a] = std::max(best[s.a], s.score);
    best[s.b] = std::max(best[s.b], s.score);
  }

  const Table spatial = data.spatial_columns();
  const CubbleMeta& meta = data.meta();
  const Schema ts_schema{data.ts_schema().front(), Field{"matched", Kind::Float64}};
  std::vector<SpatialTable> out;
  for (const auto& rows : plan.sites) {
    std::vector<Column> cols;
    for (const auto& c : spatial.columns()) cols.push_back(c.take(rows));
    std::vector<double> res;
    std::vector<TablePtr> cells;
    for (auto r : rows) {
      res.push_back(best[r]);
      const Table& src = data.ts(r);
      const std::string& var = plan.first_source[r] ? options.from_var : options.to_var;
      cells.push_back(std::make_shared<const Table>(
          Table({src.column(0), doubles_with_missing("matched", values_of(src, var))})));
    }
    cols.push_back(Column::of_doubles("match_res", std::move(res)));
    cols.push_back(Column::of_tables(std::string(kTsColumn), std::move(cells)));
    Table table(std::move(cols));
    CubbleMeta m = meta;
    m.interval = infer_step_nested(table.column(kTsColumn));
    out.push_back(SpatialTable::create(std::move(table), std::move(m), ts_schema));
  }
  return out;
}

}  // namespace cubble
