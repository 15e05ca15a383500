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

#include <span>
#include <string>
#include <vector>

#include "cubble/cubble.hpp"

namespace cubble {

struct GlyphSpec {
  std::string x_major;
  std::string y_major;
  std::string x_minor;
  std::string y_minor;
  double width = 1.0;
  double height = 1.0;
  bool polar = false;
  /// Rescale minor values over the whole dataset instead of per key.
  bool global_rescale = true;
};

/// 2(v - min)/(max - min) - 1; a constant series maps to 0. NaN stays NaN.
std::vector<double> rescale11(std::span<const double> v);
/// (v - min)/(max - min); a constant series maps to 0.5. NaN stays NaN.
std::vector<double> rescale01(std::span<const double> v);

/// Columns key, index, gx, gy; rows grouped by key in sidecar order, index
/// ascending within a key. Major columns are read from the long table or,
/// failing that, from the sidecar.
Table glyph_points(const TemporalTable& t, const GlyphSpec& spec);

/// Columns key, xmin, xmax, ymin, ymax.
Table glyph_box(const TemporalTable& t, const GlyphSpec& spec);

/// Horizontal line through each box centre: key, x0, x1, y.
Table glyph_ref_line(const TemporalTable& t, const GlyphSpec& spec);

struct SvgOptions {
  double width_px = 800.0;
  double height_px = 600.0;
  double margin_px = 20.0;
};

/// SVG with separate layers for boxes, reference lines and glyph paths.
std::string render_glyph_svg(const TemporalTable& t, const GlyphSpec& spec, const SvgOptions& options = {});

}  // namespace cubble
