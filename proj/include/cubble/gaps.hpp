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
#include <map>
#include <string>

#include "cubble/cubble.hpp"

namespace cubble {

struct Interval {
  TimeKind kind = TimeKind::Date;
  std::int64_t step = 1;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Interval label in the style "1D", "6h", "1M". Datetime steps use the
/// largest of D, h, m that divides them, else seconds.
std::string interval_label(const Interval& interval);

struct IntervalEstimate {
  Interval interval;
  /// True when no key had two observations and the step fell back to 1.
  bool defaulted = false;
};

IntervalEstimate infer_interval(const TemporalTable& t);

/// Per-key gap flag, one row per sidecar key: columns (key, ".gaps").
Table has_gaps(const TemporalTable& t);

/// Every (key, index) inside a key's own min..max span, stepping by the
/// inferred interval, that has no observation. Sorted by (key, index).
Table scan_gaps(const TemporalTable& t);

/// Values for inserted rows: a per-column constant, or Missing for columns
/// not listed. `all` applies one constant to every temporal column.
struct GapFill {
  std::map<std::string, Scalar> per_column;
  std::optional<Scalar> all;

  static GapFill missing() { return {}; }
  static GapFill constant(Scalar v) {
    GapFill f;
    f.all = std::move(v);
    return f;
  }
};

/// Inserts the scan_gaps rows. Unfolded columns take the sidecar value of
/// their key; other temporal columns follow the fill policy. Existing rows
/// are kept as they are; the result is ordered by (key, index).
TemporalTable fill_gaps(const TemporalTable& t, const GapFill& fill = GapFill::missing());

}  // namespace cubble
