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

#include "cubble/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cubble/error.hpp"

namespace cubble {

namespace {

struct Field_ {
  std::string text;
  bool quoted = false;
};

using Record = std::vector<Field_>;

std::vector<Record> split_records(std::string_view s) {
  std::vector<Record> records;
  Record rec;
  Field_ field;
  std::size_t i = 0;
  bool at_field_start = true;
  const auto end_field = [&] {
    rec.push_back(std::move(field));
    field = {};
    at_field_start = true;
  };
  const auto end_record = [&] {
    end_field();
    records.push_back(std::move(rec));
    rec.clear();
  };
  while (i < s.size()) {
    const char c = s[i];
    if (at_field_start && c == '"') {
      field.quoted = true;
      at_field_start = false;
      const std::size_t open = i++;
      for (;;) {
        if (i >= s.size()) throw FormatError("unterminated quoted field", open);
        if (s[i] == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            field.text += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field.text += s[i++];
      }
      if (i < s.size() && s[i] != ',' && s[i] != '\n' && s[i] != '\r')
        throw FormatError("unexpected character after closing quote", i);
      continue;
    }
    at_field_start = false;
    if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\n' || c == '\r') {
      end_record();
      i += (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ? 2 : 1;
    } else if (c == '"') {
      throw FormatError("quote inside an unquoted field", i);
    } else {
      field.text += c;
      ++i;
    }
  }
  if (!at_field_start || !rec.empty()) end_record();
  return records;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_f64(std::string_view s, double& out) {
  if (s == "NaN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (s == "Inf" || s == "-Inf") {
    out = s[0] == '-' ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    return true;
  }
  if (s.empty()) return false;
  // from_chars also takes "inf"/"nan" spellings; only digits-based numbers
  // and the canonical spellings above count as numbers here.
  for (char c : s)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' || c == 'e' || c == 'E'))
      return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "TRUE") return out = true, true;
  if (s == "false" || s == "FALSE") return out = false, true;
  return false;
}

/// Date and datetime readings are restricted to their ISO spellings.
bool looks_like_date(std::string_view s) { return s.size() == 10 && s[4] == '-' && s[7] == '-'; }
bool looks_like_datetime(std::string_view s) { return s.size() >= 19 && s[4] == '-' && s[7] == '-'; }

std::optional<TimePoint> parse_iso(TimeKind kind, std::string_view s) {
  if (kind == TimeKind::Date && !looks_like_date(s)) return std::nullopt;
  if (kind == TimeKind::DateTime && !looks_like_datetime(s)) return std::nullopt;
  return parse_time(kind, s);
}

Field infer_field(const std::string& name, const std::vector<Record>& rows, std::size_t j) {
  bool any = false;
  bool can_int = true, can_f64 = true, can_date = true, can_dt = true, can_bool = true;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Field_& f = rows[r][j];
    if (f.quoted) return {name, Kind::Text};
    if (f.text.empty()) continue;
    any = true;
    std::int64_t i;
    double d;
    bool b;
    can_int = can_int && parse_int(f.text, i);
    can_f64 = can_f64 && parse_f64(f.text, d);
    can_date = can_date && parse_iso(TimeKind::Date, f.text).has_value();
    can_dt = can_dt && parse_iso(TimeKind::DateTime, f.text).has_value();
    can_bool = can_bool && parse_bool(f.text, b);
    if (!(can_int || can_f64 || can_date || can_dt || can_bool)) return {name, Kind::Text};
  }
  if (!any) return {name, Kind::Text};
  if (can_int) return {name, Kind::Int64};
  if (can_f64) return {name, Kind::Float64};
  if (can_date) return {name, Kind::Time, TimeKind::Date};
  if (can_dt) return {name, Kind::Time, TimeKind::DateTime};
  if (can_bool) return {name, Kind::Bool};
  return {name, Kind::Text};
}

void push_field(Column& col, const Field_& f, std::size_t line) {
  if (f.text.empty() && !(f.quoted && col.kind() == Kind::Text)) {
    col.push_missing();
    return;
  }
  const auto fail = [&] {
    throw Error("line " + std::to_string(line) + ": '" + f.text + "' is not a valid " +
                std::string(kind_name(col.kind())) + " value for column '" + col.name() + "'");
  };
  switch (col.kind()) {
    case Kind::Int64: {
      std::int64_t v;
      if (!parse_int(f.text, v)) fail();
      col.push(v);
      break;
    }
    case Kind::Float64: {
      double v;
      if (!parse_f64(f.text, v)) fail();
      col.push(v);
      break;
    }
    case Kind::Bool: {
      bool v;
      if (!parse_bool(f.text, v)) fail();
      col.push(v);
      break;
    }
    case Kind::Time: {
      auto tp = parse_time(col.time_kind(), f.text);
      if (!tp) fail();
      col.push(*tp);
      break;
    }
    case Kind::Text: col.push(f.text); break;
    case Kind::Nested: throw Error("nested columns cannot be read from CSV");
  }
}

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  if (s.find_first_of(",\"\r\n") != std::string::npos) return true;
  std::int64_t i;
  double d;
  bool b;
  return parse_int(s, i) || parse_f64(s, d) || parse_bool(s, b) || parse_iso(TimeKind::Date, s) ||
         parse_iso(TimeKind::DateTime, s);
}

void write_quoted(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_cell(std::ostream& out, const Column& c, std::size_t r) {
  if (c.is_missing(r)) return;
  switch (c.kind()) {
    case Kind::Float64: {
      std::string s = format_double(c.f64(r));
      if (std::isfinite(c.f64(r)) && s.find_first_of(".eE") == std::string::npos) s += ".0";
      out << s;
      break;
    }
    case Kind::Text: {
      const std::string& s = c.text(r);
      if (needs_quotes(s)) {
        write_quoted(out, s);
      } else {
        out << s;
      }
      break;
    }
    default: out << c.cell_text(r);
  }
}

}  // namespace

Table parse_csv(std::string_view text, const Schema& schema) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<Record> rows = split_records(text);
  if (rows.empty()) throw Error("CSV input has no header row");
  const Record& header = rows.front();
  // A lone empty line is not a record when the table has several columns.
  if (header.size() > 1)
    std::erase_if(rows, [](const Record& r) { return r.size() == 1 && r[0].text.empty() && !r[0].quoted; });
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != header.size())
      throw Error("line " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) + " fields, found " +
                  std::to_string(rows[r].size()));

  std::vector<Column> cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& name = header[j].text;
    Field f;
    bool fixed = false;
    for (const auto& s : schema)
      if (s.name == name) f = s, fixed = true;
    if (!fixed) f = infer_field(name, rows, j);
    Column c(name, f.kind, f.time_kind);
    c.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) push_field(c, rows[r][j], r + 1);
    cols.push_back(std::move(c));
  }
  return Table(std::move(cols));
}

Table read_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), schema);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.message(), e.offset());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_csv(const Table& table, std::ostream& out) {
  for (const auto& c : table.columns())
    if (c.kind() == Kind::Nested) throw Error("column '" + c.name() + "' is nested and cannot be written as CSV");
  for (std::size_t j = 0; j < table.num_columns(); ++j) {
    if (j) out << ',';
    const std::string& n = table.column(j).name();
    if (n.find_first_of(",\"\r\n") != std::string::npos) {
      write_quoted(out, n);
    } else {
      out << n;
    }
  }
  out << '\n';
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    for (std::size_t j = 0; j < table.num_columns(); ++j) {
      if (j) out << ',';
      write_cell(out, table.column(j), r);
    }
    out << '\n';
  }
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(table, out);
  if (!out) throw Error("failed writing " + path.string());
}

std::string to_csv(const Table& table) {
  std::ostringstream os;
  write_csv(table, os);
  return os.str();
}

}  // namespace cubble
