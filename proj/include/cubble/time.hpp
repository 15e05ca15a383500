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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cubble {

/// Time-index kinds. Each kind counts in its own base unit from the Unix
/// epoch:
///   Date        days since 1970-01-01
///   DateTime    seconds since 1970-01-01T00:00:00Z (UTC only)
///   YearMonth   months since 1970-01
///   YearWeek    ISO weeks since the week of 1970-01-01 (Monday 1969-12-29)
///   YearQuarter quarters since 1970-Q1
enum class TimeKind : std::uint8_t { Date, DateTime, YearMonth, YearWeek, YearQuarter };

struct TimePoint {
  TimeKind kind = TimeKind::Date;
  std::int64_t count = 0;

  friend bool operator==(const TimePoint&, const TimePoint&) = default;
  friend auto operator<=>(const TimePoint&, const TimePoint&) = default;
};

std::string_view time_kind_name(TimeKind kind);
std::optional<TimeKind> parse_time_kind(std::string_view name);

/// One-letter unit used in interval labels such as "[1D]".
std::string_view time_unit_suffix(TimeKind kind);

/// ISO 8601 text: 2020-01-01, 2020-01-01T06:00:00Z, 2020-01, 2020-W01, 2020-Q1.
std::string format_time(TimePoint tp);

/// Inverse of format_time. DateTime additionally accepts a space separator
/// and a missing trailing "Z".
std::optional<TimePoint> parse_time(TimeKind kind, std::string_view text);

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
};

std::int64_t days_from_civil(int year, unsigned month, unsigned day);
CivilDate civil_from_days(std::int64_t days);

/// Calendar date of the first day covered by a time point.
CivilDate civil_of(TimePoint tp);

/// Period-start conversions between kinds.
TimePoint to_year_month(TimePoint tp);
TimePoint to_year_quarter(TimePoint tp);
TimePoint to_year_week(TimePoint tp);
TimePoint to_date(TimePoint tp);

TimePoint make_year_month(int year, unsigned month);

}  // namespace cubble
