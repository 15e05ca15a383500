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
#include <filesystem>
#include <random>
#include <string>

#include "cubble/cubble.hpp"

namespace cubble::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CUBBLE_FIXTURES_DIR) / name;
}

struct RandomCubbleOptions {
  std::size_t min_sites = 1;
  std::size_t max_sites = 50;
  std::size_t max_points = 200;
  /// Probability that any given cell is Missing.
  double missing_rate = 0.1;
  /// Extra spatial and temporal columns beyond key, coords and index.
  std::size_t max_extra_columns = 4;
  bool geographic = true;
};

/// Spatial cubble with randomly chosen key kind, index kind, column kinds,
/// missing cells, NaN and signed zeros, awkward text and irregular series.
SpatialTable random_cubble(std::mt19937_64& rng, const RandomCubbleOptions& options = {});

/// Random text exercising quoting: commas, quotes, newlines, leading
/// spaces, and strings that read as numbers or dates.
std::string random_text(std::mt19937_64& rng);

/// Temporal face with one Float64 variable whose series have holes at a
/// step of `step` days. Every site has at least one observation.
TemporalTable random_gapped(std::mt19937_64& rng, std::size_t max_sites, std::size_t max_span, std::int64_t step);

}  // namespace cubble::testing
