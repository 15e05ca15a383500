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
#include <span>
#include <string>
#include <vector>

#include "cubble/cubble.hpp"

namespace cubble {

struct LonLat {
  double lon;
  double lat;
};

inline constexpr double kEarthRadiusM = 6371008.8;

/// Haversine distance in meters. Throws Error on out-of-range coordinates.
double great_circle_m(LonLat a, LonLat b);

/// Row-major matrix, rows indexing sites of the first cubble.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Great-circle distances for geographic cubbles, Euclidean for projected
/// ones. Both inputs must use the same coordinate mode.
DistanceMatrix distance_matrix(const SpatialTable& df1, const SpatialTable& df2);

// ---------------------------------------------------------------------------
// Spatial matching

struct MatchPair {
  std::int64_t group = 0;
  std::size_t from_site = 0;  // row in df1
  std::size_t to_site = 0;    // row in df2
  std::string from;
  std::string to;
  double dist = 0.0;
};

struct SpatialMatchOptions {
  std::size_t n_group = 10;
  std::size_t n_each = 1;
};

struct SpatialMatch {
  /// Ordered by group, then by distance within the group.
  std::vector<MatchPair> pairs;
  std::size_t n_groups = 0;
  /// Fewer groups than requested because df1 ran out of sites.
  bool truncated = false;

  /// Columns from, to, dist, group.
  Table as_table() const;
};

SpatialMatch match_spatial(const SpatialTable& df1, const SpatialTable& df2, const SpatialMatchOptions& options = {});

struct SourceLabels {
  std::string df1 = "df1";
  std::string df2 = "df2";
};

/// One cubble per group holding the anchor followed by its matched df2
/// sites. Spatial and ts columns are the union of both inputs (absent values
/// Missing); `type`, `group` and `dist` are added before ts. The anchor row
/// carries the group's smallest distance.
std::vector<SpatialTable> match_spatial_cubbles(const SpatialTable& df1, const SpatialTable& df2,
                                                const SpatialMatch& match, const SourceLabels& labels = {});

// ---------------------------------------------------------------------------
// Temporal matching

/// Number of peaks of x with a peak of y within +-window positions. A peak
/// is a strict local maximum with both neighbours present; NaN marks a
/// missing value. Throws Error when lengths differ.
std::int64_t match_peak(std::span<const double> x, std::span<const double> y, std::int64_t window);

/// Positions of strict local maxima.
std::vector<std::size_t> find_peaks(std::span<const double> v);

using MatchFunction = std::function<double(std::span<const double>, std::span<const double>)>;

struct TemporalMatchOptions {
  std::string data_id = "type";
  std::string match_id = "group";
  /// Variable of the first source and of the second source.
  std::string from_var;
  std::string to_var;
  std::int64_t window = 5;
  /// Replaces match_peak when set.
  MatchFunction score;
};

/// Scores every (first-source, second-source) site pair inside each group.
/// Sources are told apart by data_id; the first value in row order is the
/// first source. Series are inner-joined on the index before scoring.
/// Columns: group, from, to, match_res; ordered by group.
Table match_temporal(const SpatialTable& data, const TemporalMatchOptions& options);

/// Per-group cubbles whose ts hold [index, matched], `matched` being each
/// site's compared variable, plus a `match_res` column (the best score
/// involving that site).
std::vector<SpatialTable> match_temporal_cubbles(const SpatialTable& data, const TemporalMatchOptions& options);

}  // namespace cubble
