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

#include "cubble/time.hpp"

#include <chrono>
#include <cstdio>

namespace cubble {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
// 1970-01-01 is a Thursday; ISO week 1 of 1970 starts Monday 1969-12-29.
constexpr std::int64_t kEpochWeekMonday = -3;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

bool read_uint(std::string_view s, std::size_t pos, std::size_t width, unsigned& out) {
  if (pos + width > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

bool valid_ymd(unsigned y, unsigned m, unsigned d) {
  using namespace std::chrono;
  return year_month_day{year{static_cast<int>(y)}, month{m}, day{d}}.ok();
}

std::int64_t monday_of_iso_week1(int iso_year) {
  std::int64_t jan4 = days_from_civil(iso_year, 1, 4);
  // weekday: 0 = Monday
  std::int64_t wd = floor_mod(jan4 + 3, 7);
  return jan4 - wd;
}

}  // namespace

std::string_view time_kind_name(TimeKind kind) {
  switch (kind) {
    case TimeKind::Date: return "date";
    case TimeKind::DateTime: return "datetime";
    case TimeKind::YearMonth: return "yearmonth";
    case TimeKind::YearWeek: return "yearweek";
    case TimeKind::YearQuarter: return "yearquarter";
  }
  return "date";
}

std::optional<TimeKind> parse_time_kind(std::string_view name) {
  for (auto k : {TimeKind::Date, TimeKind::DateTime, TimeKind::YearMonth, TimeKind::YearWeek,
                 TimeKind::YearQuarter}) {
    if (time_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view time_unit_suffix(TimeKind kind) {
  switch (kind) {
    case TimeKind::Date: return "D";
    case TimeKind::DateTime: return "s";
    case TimeKind::YearMonth: return "M";
    case TimeKind::YearWeek: return "W";
    case TimeKind::YearQuarter: return "Q";
  }
  return "D";
}

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  sys_days sd{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  return sd.time_since_epoch().count();
}

CivilDate civil_from_days(std::int64_t days) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day())};
}

CivilDate civil_of(TimePoint tp) { return civil_from_days(to_date(tp).count); }

TimePoint make_year_month(int year, unsigned month) {
  return {TimeKind::YearMonth, (static_cast<std::int64_t>(year) - 1970) * 12 + (month - 1)};
}

TimePoint to_date(TimePoint tp) {
  switch (tp.kind) {
    case TimeKind::Date: return tp;
    case TimeKind::DateTime: return {TimeKind::Date, floor_div(tp.count, kSecondsPerDay)};
    case TimeKind::YearMonth: {
      std::int64_t y = 1970 + floor_div(tp.count, 12);
      auto m = static_cast<unsigned>(floor_mod(tp.count, 12) + 1);
      return {TimeKind::Date, days_from_civil(static_cast<int>(y), m, 1)};
    }
    case TimeKind::YearWeek: return {TimeKind::Date, kEpochWeekMonday + tp.count * 7};
    case TimeKind::YearQuarter: {
      std::int64_t y = 1970 + floor_div(tp.count, 4);
      auto m = static_cast<unsigned>(floor_mod(tp.count, 4) * 3 + 1);
      return {TimeKind::Date, days_from_civil(static_cast<int>(y), m, 1)};
    }
  }
  return tp;
}

TimePoint to_year_month(TimePoint tp) {
  if (tp.kind == TimeKind::YearMonth) return tp;
  if (tp.kind == TimeKind::YearQuarter) return {TimeKind::YearMonth, tp.count * 3};
  CivilDate c = civil_of(tp);
  return make_year_month(c.year, c.month);
}

TimePoint to_year_quarter(TimePoint tp) {
  if (tp.kind == TimeKind::YearQuarter) return tp;
  TimePoint ym = to_year_month(tp);
  return {TimeKind::YearQuarter, floor_div(ym.count, 3)};
}

TimePoint to_year_week(TimePoint tp) {
  if (tp.kind == TimeKind::YearWeek) return tp;
  std::int64_t d = to_date(tp).count;
  return {TimeKind::YearWeek, floor_div(d - kEpochWeekMonday, 7)};
}

std::string format_time(TimePoint tp) {
  char buf[96];
  switch (tp.kind) {
    case TimeKind::Date: {
      CivilDate c = civil_from_days(tp.count);
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
      break;
    }
    case TimeKind::DateTime: {
      std::int64_t days = floor_div(tp.count, kSecondsPerDay);
      std::int64_t secs = floor_mod(tp.count, kSecondsPerDay);
      CivilDate c = civil_from_days(days);
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", c.year, c.month, c.day,
                    static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                    static_cast<int>(secs % 60));
      break;
    }
    case TimeKind::YearMonth: {
      std::int64_t y = 1970 + floor_div(tp.count, 12);
      std::snprintf(buf, sizeof buf, "%04lld-%02lld", static_cast<long long>(y),
                    static_cast<long long>(floor_mod(tp.count, 12) + 1));
      break;
    }
    case TimeKind::YearWeek: {
      std::int64_t monday = kEpochWeekMonday + tp.count * 7;
      CivilDate thursday = civil_from_days(monday + 3);
      std::int64_t week = (monday - monday_of_iso_week1(thursday.year)) / 7 + 1;
      std::snprintf(buf, sizeof buf, "%04d-W%02lld", thursday.year, static_cast<long long>(week));
      break;
    }
    case TimeKind::YearQuarter: {
      std::int64_t y = 1970 + floor_div(tp.count, 4);
      std::snprintf(buf, sizeof buf, "%04lld-Q%lld", static_cast<long long>(y),
                    static_cast<long long>(floor_mod(tp.count, 4) + 1));
      break;
    }
  }
  return buf;
}

std::optional<TimePoint> parse_time(TimeKind kind, std::string_view s) {
  unsigned y = 0, m = 0, d = 0;
  if (!read_uint(s, 0, 4, y) || s.size() < 7 || s[4] != '-') return std::nullopt;
  switch (kind) {
    case TimeKind::Date: {
      if (s.size() != 10 || s[7] != '-' || !read_uint(s, 5, 2, m) || !read_uint(s, 8, 2, d))
        return std::nullopt;
      if (!valid_ymd(y, m, d)) return std::nullopt;
      return TimePoint{kind, days_from_civil(static_cast<int>(y), m, d)};
    }
    case TimeKind::DateTime: {
      if (s.size() < 19 || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
          s[16] != ':')
        return std::nullopt;
      std::string_view rest = s.substr(19);
      if (!(rest.empty() || rest == "Z")) return std::nullopt;
      unsigned hh = 0, mm = 0, ss = 0;
      if (!read_uint(s, 5, 2, m) || !read_uint(s, 8, 2, d) || !read_uint(s, 11, 2, hh) ||
          !read_uint(s, 14, 2, mm) || !read_uint(s, 17, 2, ss))
        return std::nullopt;
      if (!valid_ymd(y, m, d) || hh > 23 || mm > 59 || ss > 59) return std::nullopt;
      std::int64_t days = days_from_civil(static_cast<int>(y), m, d);
      return TimePoint{kind, days * kSecondsPerDay + hh * 3600 + mm * 60 + ss};
    }
    case TimeKind::YearMonth: {
      if (s.size() != 7 || !read_uint(s, 5, 2, m) || m < 1 || m > 12) return std::nullopt;
      return make_year_month(static_cast<int>(y), m);
    }
    case TimeKind::YearWeek: {
      unsigned w = 0;
      if (s.size() != 8 || s[5] != 'W' || !read_uint(s, 6, 2, w) || w < 1) return std::nullopt;
      std::int64_t monday = monday_of_iso_week1(static_cast<int>(y)) + (w - 1) * 7;
      // Reject week 53 in years that only have 52 ISO weeks.
      if (civil_from_days(monday + 3).year != static_cast<int>(y)) return std::nullopt;
      return TimePoint{kind, (monday - kEpochWeekMonday) / 7};
    }
    case TimeKind::YearQuarter: {
      unsigned q = 0;
      if (s.size() != 7 || s[5] != 'Q' || !read_uint(s, 6, 1, q) || q < 1 || q > 4)
        return std::nullopt;
      return TimePoint{kind, (static_cast<std::int64_t>(y) - 1970) * 4 + (q - 1)};
    }
  }
  return std::nullopt;
}

}  // namespace cubble
