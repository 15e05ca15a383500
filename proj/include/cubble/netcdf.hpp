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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubble/cubble.hpp"

namespace cubble {

// Classic NetCDF (CDF-1 and CDF-2) reader.

enum class NcType : std::int32_t { Byte = 1, Char = 2, Short = 3, Int = 4, Float = 5, Double = 6 };

std::string_view nc_type_name(NcType t);
std::size_t nc_type_size(NcType t);

struct NcDim {
  std::string name;
  std::uint64_t length = 0;  // current record count for the record dimension
  bool is_record = false;
};

struct NcAttr {
  std::string name;
  NcType type = NcType::Char;
  std::string text;             // Char attributes
  std::vector<double> numbers;  // every other type

  std::optional<double> number() const {
    if (numbers.empty()) return std::nullopt;
    return numbers.front();
  }
};

struct NcVar {
  std::string name;
  NcType type = NcType::Double;
  std::vector<std::size_t> dim_ids;
  std::vector<NcAttr> attrs;
  std::uint64_t begin = 0;
  bool is_record = false;
  /// Bytes per record for record variables, total bytes otherwise (unpadded).
  std::uint64_t slab_bytes = 0;

  const NcAttr* attr(std::string_view name) const;
};

struct NcFile {
  int version = 1;  // 1 = classic, 2 = 64-bit offset
  std::uint64_t num_records = 0;
  std::vector<NcDim> dims;
  std::vector<NcAttr> attrs;
  /// Variables of the supported kinds (int, float, double).
  std::vector<NcVar> vars;
  /// Names of variables left out because of their kind.
  std::vector<std::string> skipped;
  std::vector<std::string> warnings;
  std::uint64_t record_bytes = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;

  const NcVar* var(std::string_view name) const;
  const NcAttr* attr(std::string_view name) const;
  std::vector<std::uint64_t> shape(const NcVar& v) const;
};

/// Decodes the header of an in-memory file and validates every declared
/// extent against its length. Throws FormatError on malformed input.
NcFile parse_netcdf(std::vector<std::uint8_t> bytes);
NcFile read_netcdf(const std::filesystem::path& path);

/// Values of a variable in storage order (last dimension fastest), widened
/// to double. Record variables are gathered across records.
std::vector<double> read_var(const NcFile& nc, const NcVar& var);
std::vector<double> read_var(const NcFile& nc, std::string_view name);

/// Header listing in the style of `ncdump -h`.
std::string ncdump_header(const NcFile& nc, std::string_view name = "file");

struct NcSelection {
  std::vector<std::string> vars;
  /// Longitude and latitude values to keep, compared after rounding to six
  /// decimals. Empty keeps every value.
  std::vector<double> lon_values;
  std::vector<double> lat_values;
};

/// Grid cells become sites with key `id` (1-based, storage order, longitude
/// fastest) and spatial columns `long`, `lat`. Each ts holds time and the
/// requested variables. Fill values read as Missing.
SpatialTable nc_to_cubble(const NcFile& nc, const NcSelection& selection);

/// Values a:b:step inclusive, as used for range arguments.
std::vector<double> value_range(double from, double to, double step);

}  // namespace cubble
