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

#include "cubble/cubble.hpp"

#include <map>
#include <random>

#include <gtest/gtest.h>

#include "cubble/csv.hpp"
#include "cubble/error.hpp"
#include "cubble/format.hpp"
#include "random_cubble.hpp"

namespace cubble {
namespace {

using testing::fixture;

const CoordNames kLongLat{"long", "lat"};

SpatialTable stations_cubble() {
  return make_cubble(read_csv(fixture("stations.csv")), read_csv(fixture("meteo.csv")), "id", "date", kLongLat).cubble;
}

TEST(MakeCubble, StationsAndMeteo) {
  const auto made = make_cubble(read_csv(fixture("stations.csv")), read_csv(fixture("meteo.csv")), "id", "date", kLongLat);
  const SpatialTable& s = made.cubble;
  EXPECT_TRUE(made.report.all_paired());
  ASSERT_EQ(s.num_sites(), 3u);
  EXPECT_EQ(s.table().names(), (std::vector<std::string>{"id", "long", "lat", "elev", "name", "wmo_id", "ts"}));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(s.ts(i).num_rows(), 10u);
    EXPECT_EQ(s.ts(i).num_columns(), 4u);
  }
  EXPECT_EQ(s.ts(0).names(), (std::vector<std::string>{"date", "prcp", "tmax", "tmin"}));
  EXPECT_EQ(s.meta().interval, 1);
  EXPECT_EQ(describe(s),
            "# cubble:   key: id [3], index: date, nested form\n"
            "# spatial:  [144.8321, -37.98, 145.0964, -37.6655], Missing CRS!\n"
            "# temporal: date [date], prcp [dbl], tmax [dbl], tmin [dbl]\n");
}

TEST(MakeCubble, SingleSiteSingleObservation) {
  const Table sp({Column::of_texts("id", {"a"}), Column::of_doubles("long", {1}), Column::of_doubles("lat", {2})});
  const Table tm({Column::of_texts("id", {"a"}), Column::of_times("date", TimeKind::Date, {5}),
                  Column::of_doubles("v", {1.5})});
  const SpatialTable s = make_cubble(sp, tm, "id", "date", kLongLat).cubble;
  ASSERT_EQ(s.num_sites(), 1u);
  EXPECT_EQ(s.ts(0).num_rows(), 1u);
  EXPECT_EQ(s.ts(0).num_columns(), 2u);
  EXPECT_FALSE(s.meta().interval.has_value());
}

TEST(MakeCubble, SortsNestedRowsByIndex) {
  const Table sp({Column::of_texts("id", {"a"}), Column::of_doubles("long", {1}), Column::of_doubles("lat", {2})});
  const Table tm({Column::of_texts("id", {"a", "a", "a"}), Column::of_times("date", TimeKind::Date, {9, 3, 6}),
                  Column::of_doubles("v", {3, 1, 2})});
  const SpatialTable s = make_cubble(sp, tm, "id", "date", kLongLat).cubble;
  EXPECT_EQ(s.ts(0).column("v"), Column::of_doubles("v", {1, 2, 3}));
  EXPECT_EQ(s.meta().interval, 3);
}

TEST(MakeCubble, PartialOverlapReportsAndProceeds) {
  const auto made = make_cubble(read_csv(fixture("lga_spatial.csv")), read_csv(fixture("lga_covid.csv")), "",
                                "date", kLongLat, {.by = KeyMapping{"lga_name_2018", "lga"}});
  EXPECT_EQ(made.cubble.num_sites(), 78u);
  EXPECT_EQ(made.report.others_temporal, (std::vector<std::string>{"Interstate", "Overseas", "Unknown"}));
  EXPECT_EQ(made.cubble.meta().key, "lga_name_2018");
  EXPECT_THROW(make_cubble(read_csv(fixture("lga_spatial.csv")), read_csv(fixture("lga_covid.csv")), "", "date",
                           kLongLat, {.by = KeyMapping{"lga_name_2018", "lga"}, .strict = true}),
               Error);
}

TEST(MakeCubble, Errors) {
  const Table sp({Column::of_texts("id", {"a", "a"}), Column::of_doubles("long", {1, 1}),
                  Column::of_doubles("lat", {2, 2})});
  const Table tm({Column::of_texts("id", {"a", "a"}), Column::of_times("date", TimeKind::Date, {1, 1})});
  EXPECT_THROW(make_cubble(sp, tm, "id", "date", kLongLat), Error);  // duplicate spatial key
  const Table sp1 = sp.take(std::vector<std::size_t>{0});
  EXPECT_THROW(make_cubble(sp1, tm, "id", "date", kLongLat), Error);  // duplicate (key, index)
  EXPECT_THROW(make_cubble(sp1, tm, "id", "when", kLongLat), Error);  // missing column
  const Table text_coords({Column::of_texts("id", {"a"}), Column::of_texts("long", {"x"}),
                           Column::of_doubles("lat", {2})});
  EXPECT_THROW(make_cubble(text_coords, tm.take(std::vector<std::size_t>{0}), "id", "date", kLongLat), Error);
  const Table other({Column::of_texts("id", {"z"}), Column::of_times("date", TimeKind::Date, {1})});
  EXPECT_THROW(make_cubble(sp1, other, "id", "date", kLongLat), Error);  // no overlap
  const Table bad_lat({Column::of_texts("id", {"a"}), Column::of_doubles("long", {1}), Column::of_doubles("lat", {91})});
  EXPECT_THROW(make_cubble(bad_lat, tm.take(std::vector<std::size_t>{0}), "id", "date", kLongLat), Error);
  MakeOptions projected;
  projected.coord_mode = CoordMode::Projected;
  EXPECT_NO_THROW(make_cubble(bad_lat, tm.take(std::vector<std::size_t>{0}), "id", "date", kLongLat, projected));
}

TEST(FromFlat, ClimateFlatEqualsMakeCubble) {
  const SpatialTable a = from_flat(read_csv(fixture("climate_flat.csv")), "id", "date", kLongLat);
  EXPECT_EQ(a, stations_cubble());
}

TEST(FromFlat, ConstantColumnsAreSpatial) {
  const Table flat({Column::of_texts("id", {"a", "a"}), Column::of_doubles("long", {1, 1}),
                    Column::of_doubles("lat", {2, 2}), Column::of_times("date", TimeKind::Date, {1, 2}),
                    Column::of_ints("k", {7, 7})});
  const SpatialTable s = from_flat(flat, "id", "date", kLongLat);
  EXPECT_EQ(s.table().names(), (std::vector<std::string>{"id", "long", "lat", "k", "ts"}));
  EXPECT_EQ(s.ts(0).names(), (std::vector<std::string>{"date"}));
}

TEST(FromFlat, VaryingCoordsIsAnError) {
  const Table flat({Column::of_texts("id", {"a", "a"}), Column::of_doubles("long", {1, 1.5}),
                    Column::of_doubles("lat", {2, 2}), Column::of_times("date", TimeKind::Date, {1, 2})});
  try {
    from_flat(flat, "id", "date", kLongLat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("long"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
}

TEST(FromFlat, RoundTripsFlattenWhenTemporalColumnsVary) {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t n_sites = 1 + rng() % 6;
    Column key("id", Kind::Text), date("date", Kind::Time, TimeKind::Date), v("v", Kind::Float64);
    std::vector<std::string> keys;
    std::vector<double> xs, ys, elev;
    for (std::size_t i = 0; i < n_sites; ++i) {
      keys.push_back("s" + std::to_string(i));
      xs.push_back(static_cast<double>(rng() % 360) - 180);
      ys.push_back(static_cast<double>(rng() % 180) - 90);
      elev.push_back(static_cast<double>(rng() % 1000) / 10);
      for (std::int64_t d = 0; d < 2 + static_cast<std::int64_t>(rng() % 5); ++d) {
        key.push(keys.back());
        date.push(TimePoint{TimeKind::Date, d});
        v.push(static_cast<double>(d) + 0.5);
      }
    }
    const Table sp({Column::of_texts("id", keys), Column::of_doubles("long", xs), Column::of_doubles("lat", ys),
                    Column::of_doubles("elev", elev)});
    const SpatialTable s = make_cubble(sp, Table({key, date, v}), "id", "date", kLongLat).cubble;
    EXPECT_EQ(from_flat(flatten(s), "id", "date", kLongLat), s);
  }
}

TEST(Faces, TemporalFaceOfStations) {
  const TemporalTable t = face_temporal(stations_cubble());
  EXPECT_EQ(t.num_rows(), 30u);
  EXPECT_EQ(t.table().names(), (std::vector<std::string>{"id", "date", "prcp", "tmax", "tmin"}));
  EXPECT_EQ(spatial_of(t).names(), (std::vector<std::string>{"id", "long", "lat", "elev", "name", "wmo_id"}));
  EXPECT_EQ(describe(t),
            "# cubble:   key: id [3], index: date, long form\n"
            "# temporal: 2020-01-01 -- 2020-01-10 [1D], no gaps\n"
            "# spatial:  long [dbl], lat [dbl], elev [dbl], name [chr], wmo_id [dbl]\n");
}

TEST(Faces, RoundTripStations) {
  const SpatialTable s = stations_cubble();
  EXPECT_EQ(face_spatial(face_temporal(s)), s);
}

TEST(Faces, EmptySeriesKeepsSidecar) {
  auto empty = std::make_shared<const Table>(
      std::vector<Column>{Column("date", Kind::Time, TimeKind::Date), Column("v", Kind::Float64)});
  const Table table({Column::of_texts("id", {"a"}), Column::of_doubles("long", {1}), Column::of_doubles("lat", {2}),
                     Column::of_tables("ts", {empty})});
  const SpatialTable s =
      SpatialTable::create(table, {"id", "date", kLongLat, CoordMode::Geographic, TimeKind::Date, std::nullopt});
  const TemporalTable t = face_temporal(s);
  EXPECT_EQ(t.num_rows(), 0u);
  EXPECT_EQ(t.sidecar().num_rows(), 1u);
  EXPECT_EQ(face_spatial(t), s);
}

TEST(Faces, RandomRoundTripAndConservation) {
  std::mt19937_64 rng(2023);
  for (int iter = 0; iter < 100; ++iter) {
    const SpatialTable s = testing::random_cubble(rng, {.max_sites = 12, .max_points = 40});
    const TemporalTable t = face_temporal(s);
    std::size_t total = 0;
    for (std::size_t i = 0; i < s.num_sites(); ++i) total += s.ts(i).num_rows();
    ASSERT_EQ(t.num_rows(), total);
    ASSERT_EQ(t.sidecar(), s.spatial_columns());
    ASSERT_EQ(face_spatial(t), s);
  }
}

TEST(Unfold, BroadcastsSidecarColumns) {
  const TemporalTable t = face_temporal(stations_cubble());
  const std::vector<std::string> vars{"long", "lat"};
  const TemporalTable u = unfold(t, vars);
  EXPECT_EQ(u.table().names(), (std::vector<std::string>{"id", "date", "prcp", "tmax", "tmin", "long", "lat"}));
  EXPECT_EQ(u.num_rows(), 30u);
  EXPECT_EQ(u.sidecar(), t.sidecar());
  std::map<std::string, double> lon;
  for (std::size_t i = 0; i < 3; ++i) lon[t.sidecar().column("id").text(i)] = t.sidecar().column("long").f64(i);
  for (std::size_t r = 0; r < u.num_rows(); ++r)
    EXPECT_EQ(u.table().column("long").f64(r), lon[u.table().column("id").text(r)]);
  // face_spatial drops unfolded columns, so the round trip still holds.
  EXPECT_EQ(face_spatial(u), stations_cubble());
  EXPECT_EQ(unfold(t, std::vector<std::string>{}), t);
  EXPECT_THROW(unfold(t, std::vector<std::string>{"nope"}), Error);
  EXPECT_THROW(unfold(u, std::vector<std::string>{"long"}), Error);
}

TEST(Accessors, KeyIndexCoords) {
  const SpatialTable s = stations_cubble();
  EXPECT_EQ(key_vars(s), "id");
  EXPECT_EQ(index_var(s), "date");
  EXPECT_EQ(coords_of(s), kLongLat);
  EXPECT_EQ(key_data(s).num_rows(), 3u);
  EXPECT_EQ(key_data(face_temporal(s)).num_rows(), 3u);
}

TEST(CombineSites, ConcatenatesAndRejectsDuplicates) {
  const SpatialTable s = stations_cubble();
  const SpatialTable a = filter_rows(s, [](const RowView& r) { return r.row() == 0; });
  const SpatialTable b = filter_rows(s, [](const RowView& r) { return r.row() != 0; });
  EXPECT_EQ(combine_sites(std::vector<SpatialTable>{a, b}), s);
  EXPECT_EQ(combine_sites(std::vector<SpatialTable>{s}), s);
  EXPECT_THROW(combine_sites(std::vector<SpatialTable>{a, s}), Error);
}

TEST(SpatialTableCreate, RejectsInvariantViolations) {
  const CubbleMeta meta{"id", "date", kLongLat, CoordMode::Geographic, TimeKind::Date, std::nullopt};
  const auto ts = [](std::vector<std::int64_t> days) {
    return std::make_shared<const Table>(std::vector<Column>{Column::of_times("date", TimeKind::Date, std::move(days))});
  };
  const auto make = [&](std::vector<std::string> ids, std::vector<TablePtr> cells) {
    const std::size_t n = ids.size();
    return Table({Column::of_texts("id", std::move(ids)), Column::of_doubles("long", std::vector<double>(n, 0)),
                  Column::of_doubles("lat", std::vector<double>(n, 0)), Column::of_tables("ts", std::move(cells))});
  };
  EXPECT_NO_THROW(SpatialTable::create(make({"a", "b"}, {ts({1, 2}), ts({})}), meta));
  EXPECT_THROW(SpatialTable::create(make({"a", "a"}, {ts({1}), ts({1})}), meta), Error);
  EXPECT_THROW(SpatialTable::create(make({"a"}, {ts({2, 1})}), meta), Error);
  EXPECT_THROW(SpatialTable::create(make({"a"}, {ts({1, 1})}), meta), Error);
  auto months = std::make_shared<const Table>(
      std::vector<Column>{Column::of_times("date", TimeKind::YearMonth, {1})});
  EXPECT_THROW(SpatialTable::create(make({"a"}, {months}), meta), Error);
}

TEST(Footprint, NestedSmallerThanFlat) {
  const SpatialTable s = stations_cubble();
  EXPECT_LT(footprint_bytes(s), footprint_bytes(flatten(s)));
  EXPECT_EQ(flatten(s).num_rows(), 30u);
  EXPECT_EQ(flatten(s).num_columns(), 10u);
}

}  // namespace
}  // namespace cubble
