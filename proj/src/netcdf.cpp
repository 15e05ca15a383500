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

#include "cubble/netcdf.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "cubble/error.hpp"

namespace cubble {

namespace {

constexpr std::uint32_t kAbsent = 0x00;
constexpr std::uint32_t kDimensionTag = 0x0A;
constexpr std::uint32_t kVariableTag = 0x0B;
constexpr std::uint32_t kAttributeTag = 0x0C;
constexpr std::uint32_t kStreaming = 0xFFFFFFFF;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, std::size_t at) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw FormatError("size overflow", at);
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, std::size_t at) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw FormatError("size overflow", at);
  return out;
}

std::uint64_t pad4(std::uint64_t n) { return (n + 3) & ~std::uint64_t{3}; }

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : b_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }

  void need(std::uint64_t n, const char* what) const {
    if (n > remaining()) throw FormatError(std::string("truncated header while reading ") + what, pos_);
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v = (v << 8) | b_[pos_ + k];
    pos_ += 4;
    return v;
  }

  std::uint64_t u64(const char* what) {
    const std::uint64_t hi = u32(what);
    return (hi << 32) | u32(what);
  }

  /// Non-negative 32-bit count.
  std::uint32_t count(const char* what) {
    const std::size_t at = pos_;
    const std::uint32_t v = u32(what);
    if (v > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max()))
      throw FormatError(std::string("negative ") + what, at);
    return v;
  }

  std::string name(const char* what) {
    const std::uint32_t n = count(what);
    need(pad4(n), what);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    if (n == 0) throw FormatError(std::string("empty ") + what, pos_);
    pos_ += pad4(n);
    return s;
  }

  const std::uint8_t* take(std::uint64_t n, const char* what) {
    need(n, what);
    const std::uint8_t* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

NcType read_type(Reader& r) {
  const std::size_t at = r.pos();
  const std::uint32_t t = r.u32("type");
  if (t < 1 || t > 6) throw FormatError("unknown value type " + std::to_string(t), at);
  return static_cast<NcType>(t);
}

double decode(NcType type, const std::uint8_t* p) {
  switch (type) {
    case NcType::Byte:
    case NcType::Char: return static_cast<double>(static_cast<std::int8_t>(p[0]));
    case NcType::Short: return static_cast<double>(static_cast<std::int16_t>((p[0] << 8) | p[1]));
    case NcType::Int: {
      const std::uint32_t u = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
      return static_cast<double>(static_cast<std::int32_t>(u));
    }
    case NcType::Float: {
      const std::uint32_t u = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
      return static_cast<double>(std::bit_cast<float>(u));
    }
    case NcType::Double: {
      std::uint64_t u = 0;
      for (int k = 0; k < 8; ++k) u = (u << 8) | p[k];
      return std::bit_cast<double>(u);
    }
  }
  return 0.0;
}

std::vector<NcAttr> read_attrs(Reader& r) {
  const std::size_t at = r.pos();
  const std::uint32_t tag = r.u32("attribute list tag");
  const std::uint32_t n = r.count("attribute count");
  if (tag == kAbsent && n == 0) return {};
  if (tag != kAttributeTag) throw FormatError("expected an attribute list", at);
  std::vector<NcAttr> out;
  for (std::uint32_t i = 0; i < n; ++i) {
    NcAttr a;
    a.name = r.name("attribute name");
    a.type = read_type(r);
    const std::uint32_t nelems = r.count("attribute length");
    const std::uint64_t bytes = checked_mul(nelems, nc_type_size(a.type), r.pos());
    const std::uint8_t* p = r.take(pad4(bytes), "attribute values");
    if (a.type == NcType::Char) {
      a.text.assign(reinterpret_cast<const char*>(p), nelems);
      while (!a.text.empty() && a.text.back() == '\0') a.text.pop_back();
    } else {
      for (std::uint32_t k = 0; k < nelems; ++k) a.numbers.push_back(decode(a.type, p + k * nc_type_size(a.type)));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string format_attr_value(const NcAttr& a) {
  if (a.type == NcType::Char) {
    std::string s = "\"";
    for (char c : a.text) {
      if (c == '"' || c == '\\') s += '\\';
      s += c;
    }
    return s + "\"";
  }
  std::string s;
  for (std::size_t k = 0; k < a.numbers.size(); ++k) {
    if (k) s += ", ";
    s += format_double(a.numbers[k]);
    if (a.type == NcType::Float) s += "f";
    if (a.type == NcType::Short) s += "s";
    if (a.type == NcType::Byte) s += "b";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Coordinates

const NcVar* find_coord(const NcFile& nc, std::initializer_list<std::string_view> names) {
  for (auto n : names)
    if (const NcVar* v = nc.var(n)) return v;
  return nullptr;
}

struct TimeAxis {
  TimeKind kind;
  std::vector<std::int64_t> counts;
};

std::int64_t unit_seconds(std::string unit) {
  std::transform(unit.begin(), unit.end(), unit.begin(), [](unsigned char c) { return std::tolower(c); });
  if (unit == "seconds" || unit == "second" || unit == "s") return 1;
  if (unit == "hours" || unit == "hour" || unit == "h") return 3600;
  if (unit == "days" || unit == "day" || unit == "d") return 86400;
  throw Error("unsupported time unit '" + unit + "'");
}

std::int64_t origin_seconds(std::string text) {
  while (!text.empty() && text.back() == ' ') text.pop_back();
  // Drop an all-zero fractional second, e.g. "00:00:00.0".
  if (auto dot = text.rfind('.'); dot != std::string::npos && dot > 10 &&
                                  text.find_first_not_of('0', dot + 1) == std::string::npos)
    text.erase(dot);
  if (auto tp = parse_time(TimeKind::DateTime, text)) return tp->count;
  if (auto tp = parse_time(TimeKind::Date, text)) return tp->count * 86400;
  // "1900-01-01 00:00" without seconds.
  if (auto tp = parse_time(TimeKind::DateTime, text + ":00")) return tp->count;
  throw Error("cannot read time origin '" + text + "'");
}

TimeAxis decode_time(const NcFile& nc, const NcVar& var) {
  const NcAttr* units = var.attr("units");
  if (!units || units->type != NcType::Char) throw Error("time variable '" + var.name + "' has no units attribute");
  if (const NcAttr* cal = var.attr("calendar")) {
    const std::string& c = cal->text;
    if (c != "standard" && c != "gregorian" && c != "proleptic_gregorian")
      throw Error("unsupported calendar '" + c + "'");
  }
  const auto since = units->text.find(" since ");
  if (since == std::string::npos) throw Error("time units '" + units->text + "' are not '<unit> since <instant>'");
  const std::int64_t scale = unit_seconds(units->text.substr(0, since));
  const std::int64_t origin = origin_seconds(units->text.substr(since + 7));

  TimeAxis axis{TimeKind::Date, {}};
  bool whole_days = true;
  for (double v : read_var(nc, var)) {
    const double secs = v * static_cast<double>(scale);
    if (!std::isfinite(secs) || std::abs(secs - std::round(secs)) > 1e-6)
      throw Error("time value " + format_double(v) + " is not a whole number of seconds");
    const std::int64_t s = origin + static_cast<std::int64_t>(std::llround(secs));
    whole_days = whole_days && s % 86400 == 0;
    axis.counts.push_back(s);
  }
  if (whole_days) {
    for (auto& c : axis.counts) c /= 86400;
  } else {
    axis.kind = TimeKind::DateTime;
  }
  return axis;
}

std::int64_t micro_key(double v) { return std::llround(v * 1e6); }

std::vector<std::size_t> select_positions(const std::vector<double>& values, const std::vector<double>& wanted) {
  std::set<std::int64_t> keep;
  for (double w : wanted) keep.insert(micro_key(w));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (wanted.empty() || keep.contains(micro_key(values[i]))) out.push_back(i);
  return out;
}

struct VarLayout {
  const NcVar* var;
  bool has_time;
  std::vector<double> values;
  std::vector<double> fills;
  std::optional<double> scale;
  std::optional<double> offset;
};

}  // namespace

std::string_view nc_type_name(NcType t) {
  switch (t) {
    case NcType::Byte: return "byte";
    case NcType::Char: return "char";
    case NcType::Short: return "short";
    case NcType::Int: return "int";
    case NcType::Float: return "float";
    case NcType::Double: return "double";
  }
  return "unknown";
}

std::size_t nc_type_size(NcType t) {
  switch (t) {
    case NcType::Byte:
    case NcType::Char: return 1;
    case NcType::Short: return 2;
    case NcType::Int:
    case NcType::Float: return 4;
    case NcType::Double: return 8;
  }
  return 1;
}

const NcAttr* NcVar::attr(std::string_view n) const {
  for (const auto& a : attrs)
    if (a.name == n) return &a;
  return nullptr;
}

const NcVar* NcFile::var(std::string_view n) const {
  for (const auto& v : vars)
    if (v.name == n) return &v;
  return nullptr;
}

const NcAttr* NcFile::attr(std::string_view n) const {
  for (const auto& a : attrs)
    if (a.name == n) return &a;
  return nullptr;
}

std::vector<std::uint64_t> NcFile::shape(const NcVar& v) const {
  std::vector<std::uint64_t> s;
  for (auto id : v.dim_ids) s.push_back(dims[id].length);
  return s;
}

NcFile parse_netcdf(std::vector<std::uint8_t> bytes) {
  auto shared = std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes));
  const std::vector<std::uint8_t>& b = *shared;
  Reader r(b);
  NcFile nc;
  nc.bytes = shared;

  const std::uint8_t* magic = r.take(4, "magic");
  if (magic[0] != 'C' || magic[1] != 'D' || magic[2] != 'F') throw FormatError("not a classic NetCDF file", 0);
  if (magic[3] != 1 && magic[3] != 2)
    throw FormatError("unsupported NetCDF format version " + std::to_string(magic[3]), 3);
  nc.version = magic[3];

  const std::size_t numrecs_at = r.pos();
  const std::uint32_t numrecs = r.u32("record count");
  const bool streaming = numrecs == kStreaming;
  if (!streaming && numrecs > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max()))
    throw FormatError("negative record count", numrecs_at);

  // Dimensions.
  {
    const std::size_t at = r.pos();
    const std::uint32_t tag = r.u32("dimension list tag");
    const std::uint32_t n = r.count("dimension count");
    if (!(tag == kAbsent && n == 0)) {
      if (tag != kDimensionTag) throw FormatError("expected a dimension list", at);
      for (std::uint32_t i = 0; i < n; ++i) {
        NcDim d;
        d.name = r.name("dimension name");
        const std::size_t len_at = r.pos();
        d.length = r.count("dimension length");
        if (d.length == 0) {
          for (const auto& other : nc.dims)
            if (other.is_record) throw FormatError("more than one record dimension", len_at);
          d.is_record = true;
        }
        nc.dims.push_back(std::move(d));
      }
    }
  }
  nc.attrs = read_attrs(r);

  // Variables.
  std::vector<NcVar> all;
  {
    const std::size_t at = r.pos();
    const std::uint32_t tag = r.u32("variable list tag");
    const std::uint32_t n = r.count("variable count");
    if (!(tag == kAbsent && n == 0)) {
      if (tag != kVariableTag) throw FormatError("expected a variable list", at);
      for (std::uint32_t i = 0; i < n; ++i) {
        NcVar v;
        v.name = r.name("variable name");
        const std::uint32_t ndims = r.count("variable rank");
        for (std::uint32_t k = 0; k < ndims; ++k) {
          const std::size_t dim_at = r.pos();
          const std::uint32_t id = r.u32("dimension id");
          if (id >= nc.dims.size()) throw FormatError("variable '" + v.name + "' uses an undefined dimension", dim_at);
          if (nc.dims[id].is_record && k != 0)
            throw FormatError("record dimension must be the first dimension of '" + v.name + "'", dim_at);
          v.dim_ids.push_back(id);
        }
        v.attrs = read_attrs(r);
        v.type = read_type(r);
        r.u32("variable size");  // recomputed below; the stored value saturates for large variables
        v.begin = nc.version == 1 ? r.u32("variable offset") : r.u64("variable offset");
        v.is_record = !v.dim_ids.empty() && nc.dims[v.dim_ids.front()].is_record;
        std::uint64_t slab = nc_type_size(v.type);
        for (std::size_t k = v.is_record ? 1 : 0; k < v.dim_ids.size(); ++k)
          slab = checked_mul(slab, nc.dims[v.dim_ids[k]].length, r.pos());
        v.slab_bytes = slab;
        all.push_back(std::move(v));
      }
    }
  }
  const std::size_t header_end = r.pos();

  std::size_t record_vars = 0;
  std::uint64_t first_record = std::numeric_limits<std::uint64_t>::max();
  for (const auto& v : all) {
    if (!v.is_record) continue;
    ++record_vars;
    first_record = std::min(first_record, v.begin);
  }
  for (const auto& v : all)
    if (v.is_record) nc.record_bytes = checked_add(nc.record_bytes, record_vars == 1 ? v.slab_bytes : pad4(v.slab_bytes), 0);

  if (streaming) {
    nc.num_records = 0;
    if (record_vars > 0 && nc.record_bytes > 0 && first_record <= b.size())
      nc.num_records = (b.size() - first_record) / nc.record_bytes;
  } else {
    nc.num_records = numrecs;
  }
  for (auto& d : nc.dims)
    if (d.is_record) d.length = nc.num_records;

  for (auto& v : all) {
    if (v.begin < header_end && (v.slab_bytes > 0 && (!v.is_record || nc.num_records > 0)))
      throw FormatError("data of '" + v.name + "' overlaps the header", header_end);
    std::uint64_t end = v.begin;
    if (v.is_record) {
      if (nc.num_records > 0)
        end = checked_add(checked_add(v.begin, checked_mul(nc.num_records - 1, nc.record_bytes, 0), 0), v.slab_bytes, 0);
    } else {
      end = checked_add(v.begin, v.slab_bytes, 0);
    }
    if (end > b.size())
      throw FormatError("data of '" + v.name + "' extends past the end of the file (needs " + std::to_string(end) +
                            " bytes)",
                        b.size());
    if (v.type == NcType::Byte || v.type == NcType::Char || v.type == NcType::Short) {
      nc.warnings.push_back("skipping variable '" + v.name + "' of unsupported type " +
                            std::string(nc_type_name(v.type)));
      nc.skipped.push_back(v.name);
      continue;
    }
    nc.vars.push_back(std::move(v));
  }
  return nc;
}

NcFile read_netcdf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_netcdf(std::move(bytes));
}

std::vector<double> read_var(const NcFile& nc, const NcVar& var) {
  const auto& b = *nc.bytes;
  const std::size_t width = nc_type_size(var.type);
  const std::uint64_t per_slab = var.slab_bytes / width;
  const std::uint64_t slabs = var.is_record ? nc.num_records : 1;
  std::vector<double> out;
  out.reserve(per_slab * slabs);
  for (std::uint64_t k = 0; k < slabs; ++k) {
    const std::uint64_t base = var.begin + k * nc.record_bytes;
    for (std::uint64_t i = 0; i < per_slab; ++i) out.push_back(decode(var.type, b.data() + base + i * width));
  }
  return out;
}

std::vector<double> read_var(const NcFile& nc, std::string_view name) {
  const NcVar* v = nc.var(name);
  if (!v) throw Error("no variable '" + std::string(name) + "'");
  return read_var(nc, *v);
}

std::string ncdump_header(const NcFile& nc, std::string_view name) {
  std::ostringstream os;
  os << "netcdf " << name << " {\n";
  if (!nc.dims.empty()) os << "dimensions:\n";
  for (const auto& d : nc.dims) {
    os << '\t' << d.name << " = ";
    if (d.is_record) {
      os << "UNLIMITED ; // (" << d.length << " currently)\n";
    } else {
      os << d.length << " ;\n";
    }
  }
  if (!nc.vars.empty()) os << "variables:\n";
  for (const auto& v : nc.vars) {
    os << '\t' << nc_type_name(v.type) << ' ' << v.name;
    if (!v.dim_ids.empty()) {
      os << '(';
      for (std::size_t k = 0; k < v.dim_ids.size(); ++k) os << (k ? ", " : "") << nc.dims[v.dim_ids[k]].name;
      os << ')';
    }
    os << " ;\n";
    for (const auto& a : v.attrs) os << "\t\t" << v.name << ':' << a.name << " = " << format_attr_value(a) << " ;\n";
  }
  for (const auto& s : nc.skipped) os << "\t// " << s << ": unsupported type, skipped\n";
  if (!nc.attrs.empty()) {
    os << "\n// global attributes:\n";
    for (const auto& a : nc.attrs) os << "\t\t:" << a.name << " = " << format_attr_value(a) << " ;\n";
  }
  os << "}\n";
  return os.str();
}

std::vector<double> value_range(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(from) || !std::isfinite(to))
    throw Error("range step must be positive and bounds finite");
  std::vector<double> out;
  if (to < from) return out;
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < n; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

SpatialTable nc_to_cubble(const NcFile& nc, const NcSelection& sel) {
  const NcVar* lon = find_coord(nc, {"lon", "long", "longitude"});
  const NcVar* lat = find_coord(nc, {"lat", "latitude"});
  const NcVar* time = find_coord(nc, {"time"});
  if (!lon || !lat) throw Error("no longitude/latitude coordinate variables found");
  if (!time) throw Error("no time coordinate variable found");
  for (const NcVar* c : {lon, lat, time})
    if (c->dim_ids.size() != 1) throw Error("coordinate variable '" + c->name + "' must be one-dimensional");
  if (sel.vars.empty()) throw Error("no variables requested");

  const std::size_t lon_dim = lon->dim_ids[0], lat_dim = lat->dim_ids[0], time_dim = time->dim_ids[0];
  std::vector<double> lons = read_var(nc, *lon);
  const std::vector<double> lats = read_var(nc, *lat);
  for (auto& v : lons)
    if (v > 180.0) v -= 360.0;
  for (double v : lons)
    if (!(v >= -180.0 && v <= 180.0)) throw Error("longitude value " + format_double(v) + " out of range");
  for (double v : lats)
    if (!(v >= -90.0 && v <= 90.0)) throw Error("latitude value " + format_double(v) + " out of range");
  const TimeAxis axis = decode_time(nc, *time);
  const std::size_t nt = axis.counts.size(), ny = lats.size(), nx = lons.size();

  std::vector<VarLayout> layouts;
  for (const auto& name : sel.vars) {
    const NcVar* v = nc.var(name);
    if (!v) {
      if (std::find(nc.skipped.begin(), nc.skipped.end(), name) != nc.skipped.end())
        throw Error("variable '" + name + "' has an unsupported type");
      throw Error("no variable '" + name + "'");
    }
    std::vector<std::size_t> dims;
    for (auto id : v->dim_ids)
      if (id == lon_dim || id == lat_dim || id == time_dim || nc.dims[id].length != 1) dims.push_back(id);
    const bool with_time = dims == std::vector<std::size_t>{time_dim, lat_dim, lon_dim};
    if (!with_time && dims != std::vector<std::size_t>{lat_dim, lon_dim})
      throw Error("variable '" + name + "' is not laid out over (time, lat, lon) or (lat, lon)");
    VarLayout l{v, with_time, read_var(nc, *v), {}, std::nullopt, std::nullopt};
    for (const char* a : {"_FillValue", "missing_value"})
      if (const NcAttr* at = v->attr(a)) l.fills.insert(l.fills.end(), at->numbers.begin(), at->numbers.end());
    if (const NcAttr* at = v->attr("scale_factor")) l.scale = at->number();
    if (const NcAttr* at = v->attr("add_offset")) l.offset = at->number();
    layouts.push_back(std::move(l));
  }

  const auto xs = select_positions(lons, sel.lon_values);
  const auto ys = select_positions(lats, sel.lat_values);
  if (xs.empty() || ys.empty()) throw Error("the longitude/latitude selection matches no grid cells");

  std::vector<std::int64_t> ids;
  std::vector<double> site_lon, site_lat;
  std::vector<TablePtr> cells;
  for (auto y : ys) {
    for (auto x : xs) {
      ids.push_back(static_cast<std::int64_t>(ids.size()) + 1);
      site_lon.push_back(lons[x]);
      site_lat.push_back(lats[y]);
      std::vector<Column> cols{Column::of_times("time", axis.kind, axis.counts)};
      for (const auto& l : layouts) {
        Column c(l.var->name, Kind::Float64);
        c.reserve(nt);
        for (std::size_t t = 0; t < nt; ++t) {
          const std::size_t at = l.has_time ? (t * ny + y) * nx + x : y * nx + x;
          const double raw = l.values[at];
          if (std::isnan(raw) || std::find(l.fills.begin(), l.fills.end(), raw) != l.fills.end()) {
            c.push_missing();
          } else {
            double v = raw;
            if (l.scale) v *= *l.scale;
            if (l.offset) v += *l.offset;
            c.push(v);
          }
        }
        cols.push_back(std::move(c));
      }
      cells.push_back(std::make_shared<const Table>(std::move(cols)));
    }
  }

  Table table({Column::of_ints("id", std::move(ids)), Column::of_doubles("long", std::move(site_lon)),
               Column::of_doubles("lat", std::move(site_lat)), Column::of_tables(std::string(kTsColumn), std::move(cells))});
  CubbleMeta meta{"id", "time", {"long", "lat"}, CoordMode::Geographic, axis.kind, std::nullopt};
  meta.interval = infer_step_nested(table.column(kTsColumn));
  return SpatialTable::create(std::move(table), std::move(meta));
}

}  // namespace cubble
