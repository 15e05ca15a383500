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

#include <cmath>

#include "cubble/cubble.hpp"
#include "json.hpp"

namespace cubble::app {

using nlohmann::json;

/// JSON reading of one cell: null for Missing and non-finite doubles, ISO
/// text for time values, nested tables as arrays of row objects.
json cell_json(const Column& c, std::size_t row);

inline json row_json(const Table& t, std::size_t row) {
  json out = json::object();
  for (const auto& c : t.columns()) out[c.name()] = cell_json(c, row);
  return out;
}

inline json table_json(const Table& t) {
  json out = json::array();
  for (std::size_t r = 0; r < t.num_rows(); ++r) out.push_back(row_json(t, r));
  return out;
}

inline json cell_json(const Column& c, std::size_t row) {
  if (c.is_missing(row)) return nullptr;
  switch (c.kind()) {
    case Kind::Float64: return std::isfinite(c.f64(row)) ? json(c.f64(row)) : json(nullptr);
    case Kind::Int64: return c.i64(row);
    case Kind::Text: return c.text(row);
    case Kind::Bool: return c.boolean(row);
    case Kind::Time: return format_time(c.time(row));
    case Kind::Nested: return table_json(c.nested(row));
  }
  return nullptr;
}

}  // namespace cubble::app
