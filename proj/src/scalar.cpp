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

#include "cubble/scalar.hpp"

#include <charconv>
#include <cmath>

namespace cubble {

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::Float64: return "dbl";
    case Kind::Int64: return "int";
    case Kind::Text: return "chr";
    case Kind::Bool: return "lgl";
    case Kind::Time: return "time";
    case Kind::Nested: return "list";
  }
  return "chr";
}

std::optional<Kind> parse_kind(std::string_view name) {
  for (auto k : {Kind::Float64, Kind::Int64, Kind::Text, Kind::Bool, Kind::Time, Kind::Nested}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

Kind kind_of(const Scalar& s) {
  switch (s.index()) {
    case 1: return Kind::Float64;
    case 2: return Kind::Int64;
    case 3: return Kind::Text;
    case 4: return Kind::Bool;
    case 5: return Kind::Time;
    default: return Kind::Text;
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_text(const Scalar& s) {
  struct Visitor {
    std::string operator()(Missing) const { return {}; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(TimePoint v) const { return format_time(v); }
  };
  return std::visit(Visitor{}, s);
}

int compare_scalars(const Scalar& a, const Scalar& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  auto three_way = [](const auto& x, const auto& y) { return x < y ? -1 : (y < x ? 1 : 0); };
  switch (a.index()) {
    case 0: return 0;
    case 1: return three_way(std::get<double>(a), std::get<double>(b));
    case 2: return three_way(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
    case 3: return three_way(std::get<std::string>(a), std::get<std::string>(b));
    case 4: return three_way(std::get<bool>(a), std::get<bool>(b));
    case 5: return three_way(std::get<TimePoint>(a), std::get<TimePoint>(b));
  }
  return 0;
}

}  // namespace cubble
