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
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "cubble/time.hpp"

namespace cubble {

struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

using Scalar = std::variant<Missing, double, std::int64_t, std::string, bool, TimePoint>;

/// Storage kind of a column. Nested columns hold one table per cell.
enum class Kind : std::uint8_t { Float64, Int64, Text, Bool, Time, Nested };

/// Short type tags used in headers and schemas: dbl, int, chr, lgl, time, list.
std::string_view kind_name(Kind kind);
std::optional<Kind> parse_kind(std::string_view name);

inline bool is_missing(const Scalar& s) { return std::holds_alternative<Missing>(s); }

/// Kind of a non-missing scalar.
Kind kind_of(const Scalar& s);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Canonical text of a scalar; Missing renders as "".
std::string to_text(const Scalar& s);

/// Total order for sorting: Missing first, then by kind, then by value.
int compare_scalars(const Scalar& a, const Scalar& b);

}  // namespace cubble
