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

#include "cubble/format.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "cubble/gaps.hpp"

namespace cubble {

namespace {

std::string tag_of(Kind kind, TimeKind tk) {
  return kind == Kind::Time ? std::string(time_kind_name(tk)) : std::string(kind_name(kind));
}

std::string field_list(const Schema& schema, std::size_t from, const std::string& skip = "") {
  std::string out;
  for (std::size_t k = from; k < schema.size(); ++k) {
    if (schema[k].name == skip) continue;
    if (!out.empty()) out += ", ";
    out += type_tag(schema[k]);
  }
  return out;
}

std::string cubble_line(const CubbleMeta& m, std::size_t sites, const char* form) {
  return "# cubble:   key: " + m.key + " [" + std::to_string(sites) + "], index: " + m.index + ", " + form + "\n";
}

}  // namespace

std::string type_tag(const Field& f) { return f.name + " [" + tag_of(f.kind, f.time_kind) + "]"; }

std::string describe(const SpatialTable& s) {
  const CubbleMeta& m = s.meta();
  std::string out = cubble_line(m, s.num_sites(), "nested form");
  const auto xs = s.table().column(m.coords.x).to_doubles();
  const auto ys = s.table().column(m.coords.y).to_doubles();
  const auto bound = [](const std::vector<double>& v, bool lo) {
    double b = lo ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (double x : v)
      if (x == x) b = lo ? std::min(b, x) : std::max(b, x);
    return b;
  };
  out += "# spatial:  ";
  if (s.num_sites() == 0) {
    out += "(no sites)";
  } else {
    out += "[" + format_double(bound(xs, true)) + ", " + format_double(bound(ys, true)) + ", " +
           format_double(bound(xs, false)) + ", " + format_double(bound(ys, false)) + "]";
  }
  out += m.coord_mode == CoordMode::Geographic ? ", Missing CRS!\n" : ", projected\n";
  out += "# temporal: " + field_list(s.ts_schema(), 0) + "\n";
  return out;
}

std::string describe(const TemporalTable& t) {
  const CubbleMeta& m = t.meta();
  std::string out = cubble_line(m, t.sidecar().num_rows(), "long form");
  out += "# temporal: ";
  const Column& index = t.index_column();
  if (index.size() == 0) {
    out += "(no observations)\n";
  } else {
    std::int64_t lo = index.i64(0), hi = index.i64(0);
    for (std::size_t r = 1; r < index.size(); ++r) {
      lo = std::min(lo, index.i64(r));
      hi = std::max(hi, index.i64(r));
    }
    const auto est = infer_interval(t);
    const Table flags = has_gaps(t);
    bool gaps = false;
    for (std::size_t r = 0; r < flags.num_rows(); ++r) gaps = gaps || flags.column(1).boolean(r);
    out += format_time({m.index_kind, lo}) + " -- " + format_time({m.index_kind, hi}) + " [" +
           interval_label(est.interval) + "], " + (gaps ? "has gaps!" : "no gaps") + "\n";
  }
  out += "# spatial:  " + field_list(t.sidecar().schema(), 0, m.key) + "\n";
  return out;
}

std::string preview(const Table& t, std::size_t max_rows) {
  const std::size_t rows = std::min(max_rows, t.num_rows());
  std::vector<std::vector<std::string>> cells(t.num_columns());
  std::vector<std::size_t> width(t.num_columns(), 0);
  for (std::size_t j = 0; j < t.num_columns(); ++j) {
    const Column& c = t.column(j);
    cells[j].push_back(c.name());
    cells[j].push_back("<" + tag_of(c.kind(), c.time_kind()) + ">");
    for (std::size_t r = 0; r < rows; ++r) cells[j].push_back(c.is_missing(r) ? "NA" : c.cell_text(r));
    for (const auto& s : cells[j]) width[j] = std::max(width[j], s.size());
  }
  std::ostringstream os;
  const std::size_t label = std::to_string(rows).size();
  for (std::size_t line = 0; line < rows + 2; ++line) {
    const std::string prefix = line < 2 ? "" : std::to_string(line - 1);
    os << std::string(label - prefix.size(), ' ') << prefix;
    for (std::size_t j = 0; j < t.num_columns(); ++j) {
      const std::string& s = cells[j][line];
      const bool right = t.column(j).is_numeric();
      os << ' ' << (right ? std::string(width[j] - s.size(), ' ') + s : s + std::string(width[j] - s.size(), ' '));
    }
    os << '\n';
  }
  if (t.num_rows() > rows) os << "# ... " << (t.num_rows() - rows) << " more rows\n";
  return os.str();
}

}  // namespace cubble
