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

#include "cubble/cli.hpp"

#include <charconv>
#include <csignal>
#include <pthread.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "app_json.hpp"
#include "cubble/bundle.hpp"
#include "cubble/csv.hpp"
#include "cubble/error.hpp"
#include "cubble/format.hpp"
#include "cubble/gaps.hpp"
#include "cubble/glyph.hpp"
#include "cubble/match.hpp"
#include "cubble/netcdf.hpp"
#include "cubble/service.hpp"

namespace cubble {

namespace {

namespace fs = std::filesystem;
using app::json;

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

/// Usage problems found after parsing (bad value syntax) map to exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CoordNames parse_coords(const std::string& s) {
  const auto p = split(s, ',');
  if (p.size() != 2 || p[0].empty() || p[1].empty()) throw UsageError("--coords expects x,y");
  return {p[0], p[1]};
}

KeyMapping parse_mapping(const std::string& s, const char* flag) {
  const auto p = split(s, '=');
  if (p.size() != 2 || p[0].empty() || p[1].empty()) throw UsageError(std::string(flag) + " expects left=right");
  return {p[0], p[1]};
}

std::vector<double> parse_range(const std::string& s, const char* flag) {
  const auto p = split(s, ':');
  if (p.size() != 3) throw UsageError(std::string(flag) + " expects from:to:step");
  double v[3];
  for (int i = 0; i < 3; ++i) {
    auto [ptr, ec] = std::from_chars(p[i].data(), p[i].data() + p[i].size(), v[i]);
    if (ec != std::errc() || ptr != p[i].data() + p[i].size())
      throw UsageError(std::string(flag) + ": '" + p[i] + "' is not a number");
  }
  return value_range(v[0], v[1], v[2]);
}

Scalar parse_fill(const std::string& s) {
  if (s == "missing" || s == "NA") return Missing{};
  std::int64_t i;
  if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i); ec == std::errc() && p == s.data() + s.size())
    return i;
  double d;
  if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d); ec == std::errc() && p == s.data() + s.size())
    return d;
  if (s == "true") return true;
  if (s == "false") return false;
  return s;
}

SpatialTable load(const std::string& path) {
  if (!fs::is_directory(path)) throw Error(path + " is not a cubble bundle directory");
  return load_bundle(path);
}

void emit_table(const Context& ctx, const Table& t, const std::string& out_path = {}) {
  if (!out_path.empty()) {
    write_csv(t, fs::path(out_path));
  } else if (ctx.json) {
    ctx.out << app::table_json(t).dump(2) << '\n';
  } else {
    write_csv(t, ctx.out);
  }
}

json meta_json(const CubbleMeta& m) {
  json j{{"key", m.key},
         {"index", m.index},
         {"index_kind", time_kind_name(m.index_kind)},
         {"coords", {m.coords.x, m.coords.y}},
         {"coord_mode", coord_mode_name(m.coord_mode)}};
  j["interval"] = m.interval ? json(*m.interval) : json(nullptr);
  return j;
}

json report_json(const KeyReport& r) {
  const auto pairs = [](const Table& t) {
    json a = json::array();
    for (std::size_t i = 0; i < t.num_rows(); ++i) a.push_back({t.column(0).cell_text(i), t.column(1).cell_text(i)});
    return a;
  };
  return json{{"paired", pairs(r.paired)},
              {"potential_pairs", pairs(r.potential_pairs)},
              {"others", {{"spatial", r.others_spatial}, {"temporal", r.others_temporal}}}};
}

std::string quoted_list(const std::vector<std::string>& v) {
  if (v.empty()) return "(none)";
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + ("\"" + x + "\"");
  return s;
}

void print_report(std::ostream& out, const KeyReport& r) {
  out << "paired: " << r.paired.num_rows() << " x 2\n" << preview(r.paired, 5) << '\n';
  out << "potential_pairs: " << r.potential_pairs.num_rows() << " x 2\n"
      << preview(r.potential_pairs, r.potential_pairs.num_rows()) << '\n';
  out << "others:\n";
  out << "  spatial:  " << quoted_list(r.others_spatial) << '\n';
  out << "  temporal: " << quoted_list(r.others_temporal) << '\n';
}

void warn_report(std::ostream& err, const KeyReport& r) {
  if (r.all_paired()) return;
  if (!r.others_spatial.empty() || r.potential_pairs.num_rows() > 0)
    err << "! Some sites in the spatial table don't have temporal information\n";
  if (!r.others_temporal.empty() || r.potential_pairs.num_rows() > 0)
    err << "! Some sites in the temporal table don't have spatial information\n";
  err << "! Run `cubble checkkey` on the inputs to inspect unmatched keys\n";
}

void show(const Context& ctx, const SpatialTable& s) {
  if (ctx.json) {
    ctx.out << json{{"meta", meta_json(s.meta())}, {"sites", s.num_sites()}}.dump(2) << '\n';
    return;
  }
  ctx.out << describe(s) << preview(s.table());
}

void show(const Context& ctx, const TemporalTable& t) {
  if (ctx.json) {
    json j{{"meta", meta_json(t.meta())}, {"rows", t.num_rows()}, {"sites", t.sidecar().num_rows()}};
    j["has_gaps"] = false;
    const Table g = has_gaps(t);
    for (std::size_t i = 0; i < g.num_rows(); ++i) j["has_gaps"] = j["has_gaps"].get<bool>() || g.column(1).boolean(i);
    ctx.out << j.dump(2) << '\n';
    return;
  }
  ctx.out << describe(t) << preview(t.table());
}

void save_if(const std::string& dir, const SpatialTable& s) {
  if (!dir.empty()) save_bundle(s, dir);
}

std::vector<std::string> var_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& v : split(s, ','))
    if (!v.empty()) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------

struct Options {
  // shared
  std::string input;
  std::string out;
  std::string key;
  std::string index;
  std::string coords;
  std::string by;
  std::string vars;
  bool projected = false;
  // make
  std::string spatial_csv;
  std::string temporal_csv;
  bool strict = false;
  // gaps
  std::string fill = "missing";
  // match
  std::string other;
  std::vector<std::string> inputs;
  std::size_t n_group = 10;
  std::size_t n_each = 1;
  std::int64_t window = 5;
  std::string emit = "table";
  std::string data_id = "type";
  std::string match_id = "group";
  std::string labels;
  // glyph
  std::string x_major, y_major, x_minor, y_minor;
  double width = 1.0;
  double height = 1.0;
  bool polar = false;
  bool local_rescale = false;
  std::string svg;
  // netcdf
  bool header_only = false;
  std::string lon_range, lat_range;
  // summarise
  std::string bucket = "month";
  std::string agg = "mean";
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  bool cors = false;
};

int cmd_make(const Context& ctx, const Options& o) {
  MakeOptions mo;
  if (!o.by.empty()) mo.by = parse_mapping(o.by, "--by");
  if (o.key.empty() && !mo.by) throw UsageError("make needs --key or --by");
  mo.coord_mode = o.projected ? CoordMode::Projected : CoordMode::Geographic;
  mo.strict = o.strict;
  const CoordNames coords = parse_coords(o.coords);
  const Table spatial = read_csv(o.spatial_csv);
  const Table temporal = read_csv(o.temporal_csv);
  const std::string key = o.key.empty() ? mo.by->spatial : o.key;
  auto made = make_cubble(spatial, temporal, key, o.index, coords, mo);
  if (ctx.json) {
    ctx.out << json{{"meta", meta_json(made.cubble.meta())},
                    {"sites", made.cubble.num_sites()},
                    {"report", report_json(made.report)}}
                   .dump(2)
            << '\n';
  } else {
    warn_report(ctx.err, made.report);
    show(ctx, made.cubble);
  }
  save_if(o.out, made.cubble);
  return kExitOk;
}

int cmd_flat(const Context& ctx, const Options& o) {
  const CoordNames coords = parse_coords(o.coords);
  const Table flat = read_csv(o.input);
  const auto cubble = from_flat(flat, o.key, o.index, coords,
                                o.projected ? CoordMode::Projected : CoordMode::Geographic);
  show(ctx, cubble);
  save_if(o.out, cubble);
  return kExitOk;
}

int cmd_flatten(const Context& ctx, const Options& o) {
  emit_table(ctx, flatten(load(o.input)), o.out);
  return kExitOk;
}

int cmd_face(const Context& ctx, const Options& o, bool temporal) {
  const SpatialTable s = load(o.input);
  if (temporal) {
    const TemporalTable t = face_temporal(s);
    show(ctx, t);
    if (!o.out.empty()) save_bundle(t, o.out);
  } else {
    show(ctx, s);
    save_if(o.out, s);
  }
  return kExitOk;
}

int cmd_unfold(const Context& ctx, const Options& o) {
  const auto vars = var_list(o.vars);
  const TemporalTable t = unfold(face_temporal(load(o.input)), vars);
  emit_table(ctx, t.table(), o.out);
  return kExitOk;
}

int cmd_checkkey(const Context& ctx, const Options& o) {
  KeyMapping by;
  if (!o.by.empty()) {
    by = parse_mapping(o.by, "--by");
  } else if (!o.key.empty()) {
    by = {o.key, o.key};
  } else {
    throw UsageError("checkkey needs --key or --by");
  }
  const KeyReport r = check_key(read_csv(o.spatial_csv), read_csv(o.temporal_csv), by);
  if (ctx.json) {
    ctx.out << report_json(r).dump(2) << '\n';
  } else {
    print_report(ctx.out, r);
  }
  return kExitOk;
}

int cmd_gaps(const Context& ctx, const Options& o, bool fill) {
  const TemporalTable t = face_temporal(load(o.input));
  if (!fill) {
    emit_table(ctx, scan_gaps(t), o.out);
    return kExitOk;
  }
  const Scalar v = parse_fill(o.fill);
  const TemporalTable filled = fill_gaps(t, is_missing(v) ? GapFill::missing() : GapFill::constant(v));
  if (o.out.empty()) {
    emit_table(ctx, filled.table());
  } else {
    save_bundle(filled, o.out);
    if (!ctx.json) ctx.out << describe(filled);
  }
  return kExitOk;
}

SourceLabels parse_labels(const std::string& s) {
  if (s.empty()) return {};
  const auto m = parse_mapping(s, "--labels");
  return {m.spatial, m.temporal};
}

int cmd_match_spatial(const Context& ctx, const Options& o) {
  const SpatialTable a = load(o.input);
  const SpatialTable b = load(o.other);
  if (o.n_group == 0 || o.n_each == 0) throw UsageError("--n-group and --n-each must be positive");
  const SpatialMatch m = match_spatial(a, b, {o.n_group, o.n_each});
  if (m.truncated) ctx.err << "! only " << m.n_groups << " groups could be formed\n";
  if (o.emit == "table") {
    emit_table(ctx, m.as_table(), o.out);
    return kExitOk;
  }
  const auto groups = match_spatial_cubbles(a, b, m, parse_labels(o.labels));
  if (o.out.empty()) throw UsageError("--emit cubbles needs --out <dir>");
  fs::create_directories(o.out);
  json written = json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const fs::path dir = fs::path(o.out) / ("group-" + std::to_string(g + 1));
    save_bundle(groups[g], dir);
    written.push_back(dir.string());
    if (!ctx.json) ctx.out << dir.string() << '\n';
  }
  if (ctx.json) ctx.out << written.dump(2) << '\n';
  return kExitOk;
}

int cmd_match_temporal(const Context& ctx, const Options& o) {
  if (o.by.empty()) throw UsageError("match temporal needs --by from=to");
  const KeyMapping vars = parse_mapping(o.by, "--by");
  if (o.window < 0) throw UsageError("--window must not be negative");
  TemporalMatchOptions mo;
  mo.data_id = o.data_id;
  mo.match_id = o.match_id;
  mo.from_var = vars.spatial;
  mo.to_var = vars.temporal;
  mo.window = o.window;
  std::vector<Table> parts;
  for (const auto& path : o.inputs) parts.push_back(match_temporal(load(path), mo));
  emit_table(ctx, Table::concat(parts), o.out);
  return kExitOk;
}

int cmd_glyph(const Context& ctx, const Options& o) {
  GlyphSpec spec{o.x_major, o.y_major, o.x_minor, o.y_minor, o.width, o.height, o.polar, !o.local_rescale};
  if (!(spec.width > 0) || !(spec.height > 0)) throw UsageError("--width and --height must be positive");
  const TemporalTable t = face_temporal(load(o.input));
  emit_table(ctx, glyph_points(t, spec), o.out);
  if (!o.svg.empty()) {
    std::ofstream svg(o.svg, std::ios::binary);
    if (!svg) throw Error("cannot write " + o.svg);
    svg << render_glyph_svg(t, spec);
  }
  return kExitOk;
}

int cmd_ncdump(const Context& ctx, const Options& o) {
  const NcFile nc = read_netcdf(o.input);
  const std::string name = fs::path(o.input).stem().string();
  if (ctx.json) {
    json vars = json::array();
    for (const auto& v : nc.vars) {
      json dims = json::array();
      for (auto d : v.dim_ids) dims.push_back(nc.dims[d].name);
      vars.push_back({{"name", v.name}, {"type", nc_type_name(v.type)}, {"dims", dims}, {"shape", nc.shape(v)}});
    }
    json dims = json::array();
    for (const auto& d : nc.dims) dims.push_back({{"name", d.name}, {"length", d.length}, {"unlimited", d.is_record}});
    ctx.out << json{{"version", nc.version}, {"dims", dims}, {"vars", vars}, {"skipped", nc.skipped}}.dump(2) << '\n';
    return kExitOk;
  }
  ctx.out << ncdump_header(nc, name);
  if (!o.header_only) {
    ctx.out << "data:\n";
    for (const auto& v : nc.vars) {
      ctx.out << "\n " << v.name << " =";
      const auto values = read_var(nc, v);
      for (std::size_t i = 0; i < values.size(); ++i) ctx.out << (i ? ", " : " ") << format_double(values[i]);
      ctx.out << " ;\n";
    }
    ctx.out << "}\n";
  }
  for (const auto& w : nc.warnings) ctx.err << "! " << w << '\n';
  return kExitOk;
}

int cmd_nc2cubble(const Context& ctx, const Options& o) {
  const NcFile nc = read_netcdf(o.input);
  NcSelection sel;
  sel.vars = var_list(o.vars);
  if (sel.vars.empty()) throw UsageError("nc2cubble needs --vars");
  if (!o.lon_range.empty()) sel.lon_values = parse_range(o.lon_range, "--lon");
  if (!o.lat_range.empty()) sel.lat_values = parse_range(o.lat_range, "--lat");
  const SpatialTable s = nc_to_cubble(nc, sel);
  show(ctx, s);
  save_if(o.out, s);
  return kExitOk;
}

int cmd_summarise(const Context& ctx, const Options& o) {
  const auto bucket = parse_bucket(o.bucket);
  const auto fn = parse_agg(o.agg);
  if (!bucket) throw UsageError("unknown bucket '" + o.bucket + "'");
  if (!fn) throw UsageError("unknown aggregation '" + o.agg + "'");
  const SpatialTable s = load(o.input);
  std::vector<std::string> vars = var_list(o.vars);
  if (vars.empty())
    for (std::size_t k = 1; k < s.ts_schema().size(); ++k) {
      const Field& f = s.ts_schema()[k];
      if (f.kind == Kind::Float64 || f.kind == Kind::Int64) vars.push_back(f.name);
    }
  std::vector<Aggregation> aggs;
  for (const auto& v : vars) aggs.push_back({v, *fn, v});
  const TemporalTable t = summarise_by(face_temporal(s), *bucket, aggs);
  emit_table(ctx, t.table(), o.out);
  return kExitOk;
}

int cmd_serve(const Context& ctx, const Options& o) {
  if (o.port < 0 || o.port > 65535) throw UsageError("--port must be in 0..65535");
  SelectionService service(load(o.input), {o.host, o.port, o.cors});
  // Server threads inherit the blocked mask; this thread takes the signal.
  sigset_t stop_signals, previous;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, &previous);
  int port = 0;
  try {
    port = service.start();
  } catch (...) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    throw;
  }
  ctx.err << "serving " << o.input << " on http://" << o.host << ':' << port << std::endl;
  int sig = 0;
  sigwait(&stop_signals, &sig);
  service.stop();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatio-temporal cubble tables"};
  app.name("cubble");
  app.require_subcommand(1);
  Options o;
  bool json_out = false;
  app.add_flag("--json", json_out, "Machine-readable JSON output");

  const auto add_out = [&](CLI::App* c, const char* what) { c->add_option("-o,--out", o.out, what); };
  const auto add_bundle = [&](CLI::App* c) { c->add_option("bundle", o.input, "Cubble bundle directory")->required(); };

  auto* make = app.add_subcommand("make", "Build a cubble from a spatial and a temporal CSV");
  make->add_option("--spatial", o.spatial_csv, "Spatial CSV")->required();
  make->add_option("--temporal", o.temporal_csv, "Temporal CSV")->required();
  make->add_option("--key", o.key, "Key column");
  make->add_option("--index", o.index, "Index column")->required();
  make->add_option("--coords", o.coords, "Coordinate columns x,y")->required();
  make->add_option("--by", o.by, "Key mapping spatial=temporal");
  make->add_flag("--projected", o.projected, "Coordinates are planar");
  make->add_flag("--strict", o.strict, "Fail when keys do not all pair");
  add_out(make, "Bundle directory to write");

  auto* flat = app.add_subcommand("flat", "Build a cubble from one flat CSV");
  flat->add_option("csv", o.input, "Flat CSV")->required();
  flat->add_option("--key", o.key, "Key column")->required();
  flat->add_option("--index", o.index, "Index column")->required();
  flat->add_option("--coords", o.coords, "Coordinate columns x,y")->required();
  flat->add_flag("--projected", o.projected, "Coordinates are planar");
  add_out(flat, "Bundle directory to write");

  auto* flatten_cmd = app.add_subcommand("flatten", "Write a cubble as one flat table");
  add_bundle(flatten_cmd);
  add_out(flatten_cmd, "CSV file to write");

  auto* face = app.add_subcommand("face", "Show or save a face of a cubble");
  face->require_subcommand(1);
  auto* face_s = face->add_subcommand("spatial", "Spatial face");
  auto* face_t = face->add_subcommand("temporal", "Temporal face");
  for (auto* c : {face_s, face_t}) {
    add_bundle(c);
    add_out(c, "Bundle directory to write");
  }

  auto* unfold_cmd = app.add_subcommand("unfold", "Long table with spatial columns broadcast");
  add_bundle(unfold_cmd);
  unfold_cmd->add_option("--vars", o.vars, "Spatial columns, comma separated")->required();
  add_out(unfold_cmd, "CSV file to write");

  auto* checkkey = app.add_subcommand("checkkey", "Compare key values of a spatial and a temporal CSV");
  checkkey->add_option("--spatial", o.spatial_csv, "Spatial CSV")->required();
  checkkey->add_option("--temporal", o.temporal_csv, "Temporal CSV")->required();
  checkkey->add_option("--key", o.key, "Key column on both sides");
  checkkey->add_option("--by", o.by, "Key mapping spatial=temporal");

  auto* gaps = app.add_subcommand("gaps", "Scan or fill index gaps");
  gaps->require_subcommand(1);
  auto* gaps_scan = gaps->add_subcommand("scan", "List missing (key, index) pairs");
  add_bundle(gaps_scan);
  add_out(gaps_scan, "CSV file to write");
  auto* gaps_fill = gaps->add_subcommand("fill", "Insert rows for missing (key, index) pairs");
  add_bundle(gaps_fill);
  gaps_fill->add_option("--fill", o.fill, "Value for inserted rows, or 'missing'");
  add_out(gaps_fill, "Bundle directory to write");

  auto* match = app.add_subcommand("match", "Match sites of two sources");
  match->require_subcommand(1);
  auto* match_s = match->add_subcommand("spatial", "Pair sites by distance");
  match_s->add_option("bundle", o.input, "First source bundle")->required();
  match_s->add_option("other", o.other, "Second source bundle")->required();
  match_s->add_option("--n-group", o.n_group, "Number of groups");
  match_s->add_option("--n-each", o.n_each, "Second-source sites per group");
  match_s->add_option("--emit", o.emit, "table or cubbles")->check(CLI::IsMember({"table", "cubbles"}));
  match_s->add_option("--labels", o.labels, "Source labels first=second");
  add_out(match_s, "CSV file, or directory with --emit cubbles");
  auto* match_t = match->add_subcommand("temporal", "Score matched groups by series peaks");
  match_t->add_option("bundles", o.inputs, "Matched group bundles")->required();
  match_t->add_option("--by", o.by, "Compared variables from=to");
  match_t->add_option("--window", o.window, "Peak window in positions");
  match_t->add_option("--data-id", o.data_id, "Column naming the source");
  match_t->add_option("--match-id", o.match_id, "Column naming the group");
  add_out(match_t, "CSV file to write");

  auto* glyph = app.add_subcommand("glyph", "Glyph map coordinates");
  add_bundle(glyph);
  glyph->add_option("--x-major", o.x_major, "Major x column")->required();
  glyph->add_option("--y-major", o.y_major, "Major y column")->required();
  glyph->add_option("--x-minor", o.x_minor, "Minor x column")->required();
  glyph->add_option("--y-minor", o.y_minor, "Minor y column")->required();
  glyph->add_option("--width", o.width, "Glyph width");
  glyph->add_option("--height", o.height, "Glyph height");
  glyph->add_flag("--polar", o.polar, "Polar glyphs");
  glyph->add_flag("--local-rescale", o.local_rescale, "Rescale each key separately");
  glyph->add_option("--svg", o.svg, "SVG file to write");
  add_out(glyph, "CSV file to write");

  auto* ncdump = app.add_subcommand("ncdump", "Print a NetCDF file");
  ncdump->add_option("file", o.input, "NetCDF file")->required();
  ncdump->add_flag("--header", o.header_only, "Header only");

  auto* nc2 = app.add_subcommand("nc2cubble", "Convert a NetCDF grid to a cubble");
  nc2->add_option("file", o.input, "NetCDF file")->required();
  nc2->add_option("--vars", o.vars, "Variables, comma separated")->required();
  nc2->add_option("--lon", o.lon_range, "Longitude range from:to:step");
  nc2->add_option("--lat", o.lat_range, "Latitude range from:to:step");
  add_out(nc2, "Bundle directory to write");

  auto* summarise = app.add_subcommand("summarise", "Aggregate series into time buckets");
  add_bundle(summarise);
  summarise->add_option("--bucket", o.bucket, "date, yearweek, yearmonth, yearquarter, year or month (of year)");
  summarise->add_option("--agg", o.agg, "mean, min, max, sum, count or var");
  summarise->add_option("--vars", o.vars, "Variables, comma separated");
  add_out(summarise, "CSV file to write");

  auto* serve = app.add_subcommand("serve", "Serve sites, series and shared selections over HTTP");
  serve->add_option("--bundle", o.input, "Cubble bundle directory")->required();
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--port", o.port, "Listen port, 0 for any free port");
  serve->add_flag("--cors", o.cors, "Allow cross-origin requests");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Context ctx{out, err, json_out};
  try {
    if (*make) return cmd_make(ctx, o);
    if (*flat) return cmd_flat(ctx, o);
    if (*flatten_cmd) return cmd_flatten(ctx, o);
    if (*face) return cmd_face(ctx, o, face_t->parsed());
    if (*unfold_cmd) return cmd_unfold(ctx, o);
    if (*checkkey) return cmd_checkkey(ctx, o);
    if (*gaps) return cmd_gaps(ctx, o, gaps_fill->parsed());
    if (*match_s) return cmd_match_spatial(ctx, o);
    if (*match_t) return cmd_match_temporal(ctx, o);
    if (*glyph) return cmd_glyph(ctx, o);
    if (*ncdump) return cmd_ncdump(ctx, o);
    if (*nc2) return cmd_nc2cubble(ctx, o);
    if (*summarise) return cmd_summarise(ctx, o);
    if (*serve) return cmd_serve(ctx, o);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace cubble
