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

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "cubble/error.hpp"
#include "json.hpp"
#include "random_cubble.hpp"

namespace cubble {
namespace {

using testing::fixture;

std::vector<std::uint8_t> bytes_of(const std::string& name) {
  std::ifstream in(fixture(name), std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json expected() {
  std::ifstream in(fixture("grid_expected.json"));
  return nlohmann::json::parse(in);
}

std::vector<double> hex_values(const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& s : j) out.push_back(std::strtod(s.get<std::string>().c_str(), nullptr));
  return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  return true;
}

TEST(NetcdfHeader, Cdf1Structure) {
  const NcFile nc = read_netcdf(fixture("grid_cdf1.nc"));
  EXPECT_EQ(nc.version, 1);
  EXPECT_EQ(nc.num_records, 8u);
  ASSERT_EQ(nc.dims.size(), 3u);
  EXPECT_EQ(nc.dims[0].name, "time");
  EXPECT_TRUE(nc.dims[0].is_record);
  EXPECT_EQ(nc.dims[1].length, 4u);
  EXPECT_EQ(nc.dims[2].length, 3u);
  ASSERT_NE(nc.attr("title"), nullptr);
  EXPECT_EQ(nc.attr("title")->text, "cubble test grid");
  std::set<std::string> names;
  for (const auto& v : nc.vars) names.insert(v.name);
  EXPECT_EQ(names, (std::set<std::string>{"longitude", "latitude", "time", "q", "z", "t2"}));
  EXPECT_EQ(nc.skipped, (std::vector<std::string>{"mask"}));
  EXPECT_FALSE(nc.warnings.empty());
  EXPECT_EQ(nc.shape(*nc.var("q")), (std::vector<std::uint64_t>{8, 3, 4}));
  EXPECT_EQ(nc.var("q")->attr("_FillValue")->number(), -32767.0);
  EXPECT_EQ(nc.var("time")->attr("units")->text, "hours since 1900-01-01 00:00:00.0");
}

TEST(NetcdfData, BitExactAgainstIndependentWriter) {
  const auto j = expected();
  for (const char* file : {"grid_cdf1.nc", "grid_cdf2.nc"}) {
    SCOPED_TRACE(file);
    const NcFile nc = read_netcdf(fixture(file));
    for (const char* v : {"longitude", "latitude", "q", "z", "t2"})
      EXPECT_TRUE(same_bits(read_var(nc, v), hex_values(j[v]))) << v;
    std::vector<double> time;
    for (const auto& h : j["time"]) time.push_back(h.get<double>());
    EXPECT_EQ(read_var(nc, "time"), time);
  }
}

TEST(NetcdfData, Cdf2MatchesCdf1) {
  const NcFile a = read_netcdf(fixture("grid_cdf1.nc"));
  const NcFile b = read_netcdf(fixture("grid_cdf2.nc"));
  EXPECT_EQ(b.version, 2);
  EXPECT_EQ(ncdump_header(a, "grid"), ncdump_header(b, "grid"));
  for (const auto& v : a.vars) EXPECT_TRUE(same_bits(read_var(a, v), read_var(b, v.name))) << v.name;
  EXPECT_THROW(read_var(a, "mask"), Error);
  EXPECT_THROW(read_var(a, "nope"), Error);
}

TEST(NetcdfData, EmptyFile) {
  const NcFile nc = read_netcdf(fixture("empty.nc"));
  ASSERT_EQ(nc.dims.size(), 1u);
  EXPECT_EQ(nc.dims[0].name, "x");
  EXPECT_EQ(nc.dims[0].length, 2u);
  EXPECT_TRUE(nc.vars.empty());
  EXPECT_NE(ncdump_header(nc).find("x = 2 ;"), std::string::npos);
  EXPECT_THROW(nc_to_cubble(nc, {{"q"}, {}, {}}), Error);
}

TEST(NetcdfHeader, DumpListsVariables) {
  const std::string h = ncdump_header(read_netcdf(fixture("grid_cdf1.nc")), "grid");
  EXPECT_EQ(h.rfind("netcdf grid {", 0), 0u);
  EXPECT_NE(h.find("time = UNLIMITED ; // (8 currently)"), std::string::npos);
  EXPECT_NE(h.find("double q(time, latitude, longitude) ;"), std::string::npos);
  EXPECT_NE(h.find("float t2(latitude, longitude) ;"), std::string::npos);
}

TEST(NcToCubble, WholeGrid) {
  const auto j = expected();
  const NcFile nc = read_netcdf(fixture("grid_cdf1.nc"));
  const SpatialTable s = nc_to_cubble(nc, {{"q", "z", "t2"}, {}, {}});
  ASSERT_EQ(s.num_sites(), 12u);
  EXPECT_EQ(s.table().names(), (std::vector<std::string>{"id", "long", "lat", "ts"}));
  EXPECT_EQ(s.meta().index_kind, TimeKind::DateTime);
  EXPECT_EQ(s.meta().interval, 6 * 3600);
  const auto q = hex_values(j["q"]), z = hex_values(j["z"]), t2 = hex_values(j["t2"]);
  const auto lons = hex_values(j["longitude"]), lats = hex_values(j["latitude"]);
  for (std::size_t y = 0; y < 3; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      const std::size_t site = y * 4 + x;
      EXPECT_EQ(s.key_column().i64(site), static_cast<std::int64_t>(site + 1));
      EXPECT_EQ(s.table().column("long").f64(site), lons[x]);
      EXPECT_EQ(s.table().column("lat").f64(site), lats[y]);
      const Table& ts = s.ts(site);
      ASSERT_EQ(ts.num_rows(), 8u);
      ASSERT_EQ(ts.names(), (std::vector<std::string>{"time", "q", "z", "t2"}));
      for (std::size_t t = 0; t < 8; ++t) {
        const std::size_t at = (t * 3 + y) * 4 + x;
        if (q[at] == j["fill"].get<double>()) {
          EXPECT_TRUE(ts.column("q").is_missing(t));
          EXPECT_EQ(at, (3u * 3 + 1) * 4 + 2);
        } else {
          EXPECT_EQ(ts.column("q").f64(t), q[at]);
        }
        EXPECT_EQ(ts.column("z").f64(t), z[at]);
        EXPECT_EQ(ts.column("t2").f64(t), t2[y * 4 + x]);
      }
    }
  }
  EXPECT_EQ(format_time(s.ts(0).column("time").time(0)), "2020-11-03T00:00:00Z");
  EXPECT_EQ(format_time(s.ts(0).column("time").time(7)), "2020-11-04T18:00:00Z");
}

TEST(NcToCubble, RangeSelectionEqualsFilteredGrid) {
  const NcFile nc = read_netcdf(fixture("grid_cdf1.nc"));
  const SpatialTable all = nc_to_cubble(nc, {{"q"}, {}, {}});
  const NcSelection sel{{"q"}, value_range(-179, -178, 1), value_range(-16, -15, 1)};
  const SpatialTable part = nc_to_cubble(nc, sel);
  ASSERT_EQ(part.num_sites(), 4u);
  const SpatialTable oracle = filter_rows(all, [](const RowView& r) {
    const double lon = *r.number("long"), lat = *r.number("lat");
    return lon >= -179 && lon <= -178 && lat >= -16 && lat <= -15;
  });
  ASSERT_EQ(oracle.num_sites(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(part.table().column("long").f64(i), oracle.table().column("long").f64(i));
    EXPECT_EQ(part.table().column("lat").f64(i), oracle.table().column("lat").f64(i));
    EXPECT_EQ(part.ts(i), oracle.ts(i));
  }
  EXPECT_THROW(nc_to_cubble(nc, {{"q"}, {50.0}, {}}), Error);
  EXPECT_THROW(nc_to_cubble(nc, {{"mask"}, {}, {}}), Error);
  EXPECT_THROW(nc_to_cubble(nc, {{"missing"}, {}, {}}), Error);
  EXPECT_THROW(nc_to_cubble(nc, {{}, {}, {}}), Error);
}

TEST(ValueRange, Inclusive) {
  EXPECT_EQ(value_range(-179, -177, 1), (std::vector<double>{-179, -178, -177}));
  EXPECT_EQ(value_range(0, 1, 0.25).size(), 5u);
  EXPECT_EQ(value_range(0, 0.3, 0.1).size(), 4u);
}

TEST(NetcdfErrors, BadMagicAndVersion) {
  auto b = bytes_of("grid_cdf1.nc");
  auto bad = b;
  bad[0] = 'X';
  try {
    parse_netcdf(bad);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  bad = b;
  bad[3] = 5;
  EXPECT_THROW(parse_netcdf(bad), FormatError);
  EXPECT_THROW(parse_netcdf({}), FormatError);
  EXPECT_THROW(read_netcdf(fixture("does_not_exist.nc")), Error);
}

TEST(NetcdfErrors, EveryTruncationIsRejected) {
  const auto b = bytes_of("grid_cdf1.nc");
  for (std::size_t n = 0; n < b.size(); ++n) {
    std::vector<std::uint8_t> cut(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(n));
    ASSERT_THROW(parse_netcdf(std::move(cut)), FormatError) << n;
  }
}

TEST(NetcdfErrors, MutatedBytesNeverCrash) {
  std::mt19937_64 rng(51);
  for (const char* file : {"grid_cdf1.nc", "grid_cdf2.nc", "empty.nc"}) {
    const auto b = bytes_of(file);
    for (int iter = 0; iter < 3000; ++iter) {
      auto m = b;
      const int edits = 1 + static_cast<int>(rng() % 4);
      for (int e = 0; e < edits; ++e) m[rng() % m.size()] = static_cast<std::uint8_t>(rng());
      try {
        const NcFile nc = parse_netcdf(std::move(m));
        for (const auto& v : nc.vars) (void)read_var(nc, v);
        (void)ncdump_header(nc);
      } catch (const Error&) {
      }
    }
  }
}

}  // namespace
}  // namespace cubble
