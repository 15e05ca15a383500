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

#include "cubble/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cubble/error.hpp"
#include "cubble/simd/kernels.hpp"

namespace cubble {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> rescale_with(std::span<const double> v, double mul, double add, double constant) {
  std::vector<double> out(v.size());
  const simd::MinMax mm = simd::minmax(v);
  if (mm.count == 0) {
    std::fill(out.begin(), out.end(), kNaN);
  } else if (mm.max == mm.min) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::isnan(v[i]) ? kNaN : constant;
  } else {
    simd::rescale(v, mm.min, mm.max - mm.min, mul, add, out);
  }
  return out;
}

void check_spec(const GlyphSpec& spec) {
  if (!(spec.width > 0.0) || !(spec.height > 0.0) || !std::isfinite(spec.width) || !std::isfinite(spec.height))
    throw Error("glyph width and height must be positive");
}

const Column& minor_column(const TemporalTable& t, const std::string& name) {
  const Column& c = t.table().column(name);
  if (!c.is_numeric() && c.kind() != Kind::Time)
    throw Error("minor column '" + name + "' must be numeric or time, found " + std::string(kind_name(c.kind())));
  return c;
}

/// Per-site major value, NaN when the site has no rows to read it from.
std::vector<double> major_values(const TemporalTable& t, const std::string& name,
                                 const std::vector<std::vector<std::size_t>>& groups) {
  const Column* col = t.table().find(name);
  const bool in_long = col != nullptr && name != t.meta().key && name != t.meta().index;
  if (!in_long) col = &t.sidecar().column(name);
  if (!col->is_numeric()) throw Error("major column '" + name + "' must be numeric");
  std::vector<double> out(groups.size(), kNaN);
  const Column& keys = t.sidecar().column(t.meta().key);
  for (std::size_t s = 0; s < groups.size(); ++s) {
    if (!in_long) {
      out[s] = col->numeric(s).value_or(kNaN);
      continue;
    }
    for (std::size_t k = 0; k < groups[s].size(); ++k) {
      const double v = col->numeric(groups[s][k]).value_or(kNaN);
      if (k == 0) {
        out[s] = v;
      } else if (!(v == out[s] || (std::isnan(v) && std::isnan(out[s])))) {
        throw Error("major column '" + name + "' varies within key " + keys.cell_text(s));
      }
    }
  }
  return out;
}

struct SiteRows {
  std::vector<std::vector<std::size_t>> groups;  // sorted by index
  std::vector<double> xm;
  std::vector<double> ym;
};

SiteRows site_rows(const TemporalTable& t, const GlyphSpec& spec) {
  check_spec(spec);
  SiteRows s{t.rows_by_site(), {}, {}};
  const Column& index = t.index_column();
  for (auto& g : s.groups)
    std::stable_sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) { return index.i64(a) < index.i64(b); });
  s.xm = major_values(t, spec.x_major, s.groups);
  s.ym = major_values(t, spec.y_major, s.groups);
  return s;
}

/// Rescaled minor values for every long-table row, scoped globally or per key.
std::vector<double> scoped(const Column& minor, const std::vector<std::vector<std::size_t>>& groups, bool global,
                           bool unit) {
  const std::vector<double> raw = minor.to_doubles();
  const auto apply = [&](std::span<const double> v) { return unit ? rescale01(v) : rescale11(v); };
  if (global) return apply(raw);
  std::vector<double> out(raw.size(), kNaN);
  std::vector<double> buf;
  for (const auto& g : groups) {
    buf.clear();
    for (auto r : g) buf.push_back(raw[r]);
    const auto res = apply(buf);
    for (std::size_t k = 0; k < g.size(); ++k) out[g[k]] = res[k];
  }
  return out;
}

Column maybe_missing(std::string name, const std::vector<double>& v) {
  Column c(std::move(name), Kind::Float64);
  c.reserve(v.size());
  for (double x : v) std::isnan(x) ? c.push_missing() : c.push(x);
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  std::string s = os.str();
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<double> rescale11(std::span<const double> v) { return rescale_with(v, 2.0, -1.0, 0.0); }
std::vector<double> rescale01(std::span<const double> v) { return rescale_with(v, 1.0, 0.0, 0.5); }

Table glyph_points(const TemporalTable& t, const GlyphSpec& spec) {
  const SiteRows s = site_rows(t, spec);
  const Column& xmin = minor_column(t, spec.x_minor);
  const Column& ymin = minor_column(t, spec.y_minor);
  const std::vector<double> rx = scoped(xmin, s.groups, spec.global_rescale, spec.polar);
  const std::vector<double> ry = scoped(ymin, s.groups, spec.global_rescale, spec.polar);
  const double hw = spec.width / 2.0;
  const double hh = spec.height / 2.0;

  std::vector<std::size_t> order;
  std::vector<double> gx, gy;
  for (std::size_t site = 0; site < s.groups.size(); ++site) {
    for (auto r : s.groups[site]) {
      order.push_back(r);
      if (spec.polar) {
        const double theta = 2.0 * std::numbers::pi * rx[r];
        gx.push_back(s.xm[site] + hw * (ry[r] * std::sin(theta)));
        gy.push_back(s.ym[site] + hh * (ry[r] * std::cos(theta)));
      } else {
        gx.push_back(s.xm[site] + hw * rx[r]);
        gy.push_back(s.ym[site] + hh * ry[r]);
      }
    }
  }
  return Table({t.key_column().take(order), t.index_column().take(order), maybe_missing("gx", gx),
                maybe_missing("gy", gy)});
}

Table glyph_box(const TemporalTable& t, const GlyphSpec& spec) {
  const SiteRows s = site_rows(t, spec);
  const double hw = spec.width / 2.0;
  const double hh = spec.height / 2.0;
  std::vector<std::size_t> sites;
  std::vector<double> x0, x1, y0, y1;
  for (std::size_t i = 0; i < s.xm.size(); ++i) {
    if (std::isnan(s.xm[i]) || std::isnan(s.ym[i])) continue;
    sites.push_back(i);
    x0.push_back(s.xm[i] - hw);
    x1.push_back(s.xm[i] + hw);
    y0.push_back(s.ym[i] - hh);
    y1.push_back(s.ym[i] + hh);
  }
  return Table({t.sidecar().column(t.meta().key).take(sites), Column::of_doubles("xmin", x0),
                Column::of_doubles("xmax", x1), Column::of_doubles("ymin", y0), Column::of_doubles("ymax", y1)});
}

Table glyph_ref_line(const TemporalTable& t, const GlyphSpec& spec) {
  const SiteRows s = site_rows(t, spec);
  const double hw = spec.width / 2.0;
  std::vector<std::size_t> sites;
  std::vector<double> x0, x1, y;
  for (std::size_t i = 0; i < s.xm.size(); ++i) {
    if (std::isnan(s.xm[i]) || std::isnan(s.ym[i])) continue;
    sites.push_back(i);
    x0.push_back(s.xm[i] - hw);
    x1.push_back(s.xm[i] + hw);
    y.push_back(s.ym[i]);
  }
  return Table({t.sidecar().column(t.meta().key).take(sites), Column::of_doubles("x0", x0),
                Column::of_doubles("x1", x1), Column::of_doubles("y", y)});
}

std::string render_glyph_svg(const TemporalTable& t, const GlyphSpec& spec, const SvgOptions& options) {
  const Table points = glyph_points(t, spec);
  const Table boxes = glyph_box(t, spec);
  const Table lines = glyph_ref_line(t, spec);

  double bx0 = std::numeric_limits<double>::infinity(), by0 = bx0;
  double bx1 = -bx0, by1 = -bx0;
  for (std::size_t i = 0; i < boxes.num_rows(); ++i) {
    bx0 = std::min(bx0, boxes.column("xmin").f64(i));
    bx1 = std::max(bx1, boxes.column("xmax").f64(i));
    by0 = std::min(by0, boxes.column("ymin").f64(i));
    by1 = std::max(by1, boxes.column("ymax").f64(i));
  }
  if (boxes.num_rows() == 0) bx0 = by0 = 0.0, bx1 = by1 = 1.0;
  const double inner_w = options.width_px - 2.0 * options.margin_px;
  const double inner_h = options.height_px - 2.0 * options.margin_px;
  const double scale = std::min(inner_w / (bx1 - bx0), inner_h / (by1 - by0));
  const auto px = [&](double x) { return options.margin_px + (x - bx0) * scale; };
  const auto py = [&](double y) { return options.margin_px + (by1 - y) * scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(options.width_px) << "\" height=\""
     << fmt(options.height_px) << "\" viewBox=\"0 0 " << fmt(options.width_px) << ' ' << fmt(options.height_px)
     << "\">\n";
  os << "<g class=\"glyph-box\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.5\">\n";
  for (std::size_t i = 0; i < boxes.num_rows(); ++i) {
    const double x0 = px(boxes.column("xmin").f64(i)), x1 = px(boxes.column("xmax").f64(i));
    const double y0 = py(boxes.column("ymax").f64(i)), y1 = py(boxes.column("ymin").f64(i));
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
       << fmt(y1 - y0) << "\"/>\n";
  }
  os << "</g>\n<g class=\"glyph-line\" stroke=\"#dddddd\" stroke-width=\"0.5\">\n";
  for (std::size_t i = 0; i < lines.num_rows(); ++i) {
    os << "<line x1=\"" << fmt(px(lines.column("x0").f64(i))) << "\" y1=\"" << fmt(py(lines.column("y").f64(i)))
       << "\" x2=\"" << fmt(px(lines.column("x1").f64(i))) << "\" y2=\"" << fmt(py(lines.column("y").f64(i)))
       << "\"/>\n";
  }
  os << "</g>\n<g class=\"glyph\" fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1\">\n";
  const Column& keys = points.column(0);
  const Column& gx = points.column("gx");
  const Column& gy = points.column("gy");
  std::size_t r = 0;
  while (r < points.num_rows()) {
    const std::string key = keys.cell_text(r);
    std::string d;
    bool pen_down = false;
    for (; r < points.num_rows() && keys.cell_text(r) == key; ++r) {
      if (gx.is_missing(r) || gy.is_missing(r)) {
        pen_down = false;
        continue;
      }
      d += (pen_down ? " L" : (d.empty() ? "M" : " M")) + fmt(px(gx.f64(r))) + ' ' + fmt(py(gy.f64(r)));
      pen_down = true;
    }
    if (!d.empty()) os << "<path data-key=\"" << xml_escape(key) << "\" d=\"" << d << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace cubble
