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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cubble/keycheck.hpp"
#include "cubble/table.hpp"
#include "cubble/time.hpp"

namespace cubble {

enum class CoordMode : std::uint8_t { Geographic, Projected };

std::string_view coord_mode_name(CoordMode mode);
std::optional<CoordMode> parse_coord_mode(std::string_view name);

/// Ordered coordinate column pair: x is longitude or easting, y latitude or
/// northing.
struct CoordNames {
  std::string x;
  std::string y;

  friend bool operator==(const CoordNames&, const CoordNames&) = default;
};

struct CubbleMeta {
  std::string key;
  std::string index;
  CoordNames coords;
  CoordMode coord_mode = CoordMode::Geographic;
  TimeKind index_kind = TimeKind::Date;
  /// Regular step in base units of index_kind, when one could be inferred.
  std::optional<std::int64_t> interval;

  friend bool operator==(const CubbleMeta&, const CubbleMeta&) = default;
};

/// Name of the nested per-site time-series column on the spatial face.
inline constexpr std::string_view kTsColumn = "ts";

/// Spatial face: one row per site, spatial columns followed by the nested
/// `ts` column. Each `ts` cell is a table whose first column is the index.
class SpatialTable {
 public:
  /// Validates every spatial-face invariant; throws Error on violation.
  /// `ts_schema` fixes the nested schema when there are no sites to infer
  /// it from; with sites present it must match the cells.
  static SpatialTable create(Table table, CubbleMeta meta, std::optional<Schema> ts_schema = std::nullopt);

  const Table& table() const noexcept { return table_; }
  const CubbleMeta& meta() const noexcept { return meta_; }

  std::size_t num_sites() const noexcept { return table_.num_rows(); }
  const Column& key_column() const { return table_.column(meta_.key); }
  const Column& ts_column() const { return table_.column(kTsColumn); }
  const Table& ts(std::size_t site) const { return ts_column().nested(site); }
  /// Schema shared by every ts cell.
  Schema ts_schema() const { return ts_schema_; }
  /// All columns except ts.
  Table spatial_columns() const;

  friend bool operator==(const SpatialTable& a, const SpatialTable& b) {
    return a.meta_ == b.meta_ && a.table_ == b.table_;
  }

 private:
  SpatialTable(Table table, CubbleMeta meta, Schema ts_schema)
      : table_(std::move(table)), meta_(std::move(meta)), ts_schema_(std::move(ts_schema)) {}

  Table table_;
  CubbleMeta meta_;
  Schema ts_schema_;
};

/// Temporal face: long table [key, index, temporal..., unfolded...] plus the
/// spatial sidecar with one row per key.
class TemporalTable {
 public:
  static TemporalTable create(Table table, Table sidecar, CubbleMeta meta);

  const Table& table() const noexcept { return table_; }
  const Table& sidecar() const noexcept { return sidecar_; }
  const CubbleMeta& meta() const noexcept { return meta_; }

  std::size_t num_rows() const noexcept { return table_.num_rows(); }
  const Column& key_column() const { return table_.column(meta_.key); }
  const Column& index_column() const { return table_.column(meta_.index); }

  /// Row indices of the long table grouped by key, in sidecar order. Keys
  /// without observations get an empty group.
  std::vector<std::vector<std::size_t>> rows_by_site() const;

  friend bool operator==(const TemporalTable& a, const TemporalTable& b) {
    return a.meta_ == b.meta_ && a.table_ == b.table_ && a.sidecar_ == b.sidecar_;
  }

 private:
  TemporalTable(Table table, Table sidecar, CubbleMeta meta)
      : table_(std::move(table)), sidecar_(std::move(sidecar)), meta_(std::move(meta)) {}

  Table table_;
  Table sidecar_;
  CubbleMeta meta_;
};

struct MakeOptions {
  /// Spatial and temporal key column names when they differ; the result key
  /// takes the spatial name.
  std::optional<KeyMapping> by;
  CoordMode coord_mode = CoordMode::Geographic;
  /// Fail instead of warning when some keys exist on only one side.
  bool strict = false;
};

struct MadeCubble {
  SpatialTable cubble;
  KeyReport report;
};

MadeCubble make_cubble(const Table& spatial, const Table& temporal, std::string_view key,
                       std::string_view index, const CoordNames& coords, const MakeOptions& options = {});

/// Columns constant within every key group become spatial, the rest temporal.
SpatialTable from_flat(const Table& flat, std::string_view key, std::string_view index,
                       const CoordNames& coords, CoordMode mode = CoordMode::Geographic);

TemporalTable face_temporal(const SpatialTable& s);
SpatialTable face_spatial(const TemporalTable& t);
TemporalTable unfold(const TemporalTable& t, std::span<const std::string> vars);
const Table& spatial_of(const TemporalTable& t);

/// Spatial columns joined onto every temporal row:
/// [key, spatial..., index, temporal...].
Table flatten(const SpatialTable& s);

/// Row-concatenation of spatial cubbles with identical schemas and disjoint keys.
SpatialTable combine_sites(std::span<const SpatialTable> parts);

// Accessors.
inline const std::string& key_vars(const SpatialTable& c) { return c.meta().key; }
inline const std::string& key_vars(const TemporalTable& c) { return c.meta().key; }
inline const std::string& index_var(const SpatialTable& c) { return c.meta().index; }
inline const std::string& index_var(const TemporalTable& c) { return c.meta().index; }
inline const CoordNames& coords_of(const SpatialTable& c) { return c.meta().coords; }
inline const CoordNames& coords_of(const TemporalTable& c) { return c.meta().coords; }
Table key_data(const SpatialTable& c);
Table key_data(const TemporalTable& c);

/// In-memory footprint in bytes, nested tables included.
std::size_t footprint_bytes(const SpatialTable& s);
std::size_t footprint_bytes(const Table& t);

/// Regular step of the index: gcd of every positive within-key difference.
/// Returns nullopt when no key has two observations.
std::optional<std::int64_t> infer_step(const Column& key, const Column& index);
/// Same rule over a nested ts column, each cell's first column being the index.
std::optional<std::int64_t> infer_step_nested(const Column& ts);

// ---------------------------------------------------------------------------
// Verbs

using RowPredicate = std::function<bool(const RowView&)>;
using RowExpression = std::function<Scalar(const RowView&)>;

SpatialTable filter_rows(const SpatialTable& c, const RowPredicate& keep);
TemporalTable filter_rows(const TemporalTable& c, const RowPredicate& keep);

/// Keeps the named columns plus the protected ones (key and coords on the
/// spatial face, key and index on the temporal face, ts always).
SpatialTable select_cols(const SpatialTable& c, std::span<const std::string> names);
TemporalTable select_cols(const TemporalTable& c, std::span<const std::string> names);

/// Adds or replaces a column computed row-wise. The kind is taken from the
/// first non-missing result.
SpatialTable derive_col(const SpatialTable& c, std::string name, const RowExpression& expr);
TemporalTable derive_col(const TemporalTable& c, std::string name, const RowExpression& expr);

enum class Bucket : std::uint8_t { Date, YearWeek, YearMonth, YearQuarter, Year, Month };
std::string_view bucket_name(Bucket b);
std::optional<Bucket> parse_bucket(std::string_view name);

enum class AggFn : std::uint8_t { Mean, Min, Max, Sum, Count, Var };
std::string_view agg_name(AggFn f);
std::optional<AggFn> parse_agg(std::string_view name);

struct Aggregation {
  std::string output;
  AggFn fn = AggFn::Mean;
  std::string column;
};

/// Groups observations by key and time bucket. The bucket becomes the new
/// index column (named after the bucket) and the interval is recomputed.
/// Missing values are skipped; an all-missing group yields Missing.
TemporalTable summarise_by(const TemporalTable& t, Bucket bucket, std::span<const Aggregation> aggs);

/// Grouping over time is only defined on the temporal face.
TemporalTable summarise_by(const SpatialTable&, Bucket, std::span<const Aggregation>) = delete;

/// Aggregate a sequence of optional values; exposed for the service and tests.
Scalar aggregate(AggFn fn, std::span<const double> values);

}  // namespace cubble
