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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cubble/error.hpp"
#include "random_cubble.hpp"

namespace cubble {
namespace {

using testing::fixture;

TEST(CsvInference, KindOrder) {
  const Table t = parse_csv(
      "i,f,d,dt,b,s\n"
      "1,26.8,2020-01-01,2020-01-01T06:00:00Z,true,abc\n"
      "2,3,2020-01-02,2020-01-01 07:00:00,FALSE,12\n");
  EXPECT_EQ(t.column("i").kind(), Kind::Int64);
  EXPECT_EQ(t.column("f").kind(), Kind::Float64);
  EXPECT_EQ(t.column("d").kind(), Kind::Time);
  EXPECT_EQ(t.column("d").time_kind(), TimeKind::Date);
  EXPECT_EQ(t.column("dt").time_kind(), TimeKind::DateTime);
  EXPECT_EQ(t.column("b").kind(), Kind::Bool);
  EXPECT_EQ(t.column("s").kind(), Kind::Text);
  EXPECT_EQ(t.column("f").f64(1), 3.0);
}

TEST(CsvInference, EmptyFieldIsMissing) {
  const Table t = parse_csv("a,b\n1,\n,x\n");
  EXPECT_EQ(t.column("a").kind(), Kind::Int64);
  EXPECT_TRUE(t.column("a").is_missing(1));
  EXPECT_TRUE(t.column("b").is_missing(0));
}

TEST(CsvInference, QuotedFieldForcesText) {
  const Table t = parse_csv("a,b\n\"1\",\"\"\n2,x\n");
  EXPECT_EQ(t.column("a").kind(), Kind::Text);
  EXPECT_FALSE(t.column("b").is_missing(0));
  EXPECT_EQ(t.column("b").text(0), "");
}

TEST(CsvParse, QuotesNewlinesAndCrlf) {
  const Table t = parse_csv("name,v\r\n\"a, \"\"b\"\"\nc\",1\r\n");
  ASSERT_EQ(t.num_rows(), 1u);
  EXPECT_EQ(t.column("name").text(0), "a, \"b\"\nc");
}

TEST(CsvParse, SchemaOverridesInference) {
  const Table t = parse_csv("wmo_id\n95866\n", {{"wmo_id", Kind::Float64}});
  EXPECT_EQ(t.column(0).kind(), Kind::Float64);
  EXPECT_EQ(t.column(0).f64(0), 95866.0);
  EXPECT_THROW(parse_csv("x\nabc\n", {{"x", Kind::Int64}}), Error);
}

TEST(CsvParse, Malformed) {
  EXPECT_THROW(parse_csv(""), Error);
  EXPECT_THROW(parse_csv("a,b\n1\n"), Error);
  EXPECT_THROW(parse_csv("a\n\"open\n"), FormatError);
  EXPECT_THROW(parse_csv("a\n\"x\"y\n"), FormatError);
  EXPECT_THROW(parse_csv("a\nx\"y\n"), FormatError);
}

TEST(CsvFixture, StationsAndMeteo) {
  const Table s = read_csv(fixture("stations.csv"));
  EXPECT_EQ(s.num_rows(), 3u);
  EXPECT_EQ(s.names(), (std::vector<std::string>{"id", "long", "lat", "elev", "name", "wmo_id"}));
  const Table m = read_csv(fixture("meteo.csv"));
  EXPECT_EQ(m.num_rows(), 30u);
  EXPECT_EQ(m.column("tmax").f64(0), 26.8);
  EXPECT_EQ(m.column("prcp").f64(4), 18.0);
}

TEST(CsvRoundTrip, WriteThenReadPreservesValues) {
  Column f("f", Kind::Float64);
  for (double v : {1.0, -0.0, 0.1, 1e300, std::nan(""), double(INFINITY), double(-INFINITY)}) f.push(v);
  f.push_missing();
  Column s("s", Kind::Text);
  for (const char* v : {"12", "", "a,b", "\"q\"", "2020-01-01", "true", "NaN", "x"}) s.push(std::string(v));
  Column b("b", Kind::Bool);
  for (int i = 0; i < 8; ++i) i % 3 ? b.push(i % 2 == 0) : b.push_missing();
  const Table t({f, s, b});
  const Table back = parse_csv(to_csv(t), t.schema());
  EXPECT_EQ(back, t);
  // Without a schema the kinds are recovered as well.
  EXPECT_EQ(parse_csv(to_csv(t)), t);
}

TEST(CsvRoundTrip, RandomTables) {
  std::mt19937_64 rng(4180);
  for (int iter = 0; iter < 200; ++iter) {
    const SpatialTable c = testing::random_cubble(rng, {.min_sites = 1, .max_sites = 12, .max_points = 30});
    const Table flat = flatten(c);
    const Table back = parse_csv(to_csv(flat), flat.schema());
    ASSERT_EQ(back, flat) << to_csv(flat);
  }
}

TEST(CsvWrite, RejectsNested) {
  auto inner = std::make_shared<const Table>(std::vector<Column>{Column::of_ints("v", {1})});
  EXPECT_THROW(to_csv(Table({Column::of_tables("ts", {inner})})), Error);
}

}  // namespace
}  // namespace cubble
