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

#include "cubble/bundle.hpp"

#include <fstream>

#include "cubble/csv.hpp"
#include "cubble/error.hpp"
#include "json.hpp"

namespace cubble {

namespace {

using nlohmann::json;

constexpr int kBundleVersion = 1;

json schema_json(const Schema& schema) {
  json out = json::array();
  for (const auto& f : schema) {
    json field{{"name", f.name}, {"kind", kind_name(f.kind)}};
    if (f.kind == Kind::Time) field["time_kind"] = time_kind_name(f.time_kind);
    out.push_back(std::move(field));
  }
  return out;
}

Schema schema_from(const json& j, const std::string& where) {
  Schema out;
  for (const auto& f : j) {
    Field field;
    field.name = f.at("name").get<std::string>();
    const auto kind = parse_kind(f.at("kind").get<std::string>());
    if (!kind || *kind == Kind::Nested) throw Error(where + ": bad kind for column '" + field.name + "'");
    field.kind = *kind;
    if (field.kind == Kind::Time) {
      const auto tk = parse_time_kind(f.at("time_kind").get<std::string>());
      if (!tk) throw Error(where + ": bad time kind for column '" + field.name + "'");
      field.time_kind = *tk;
    }
    out.push_back(std::move(field));
  }
  return out;
}

void check_columns(const Table& t, const Schema& schema, const std::string& file) {
  if (t.names().size() != schema.size()) throw Error(file + " does not match the schema in meta.json");
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (t.column(j).name() != schema[j].name)
      throw Error(file + ": expected column '" + schema[j].name + "', found '" + t.column(j).name() + "'");
}

}  // namespace

void save_bundle(const SpatialTable& cubble, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const CubbleMeta& m = cubble.meta();
  const Table spatial = cubble.spatial_columns();
  const Table temporal = face_temporal(cubble).table();
  json meta{{"format", "cubble-bundle"},
            {"version", kBundleVersion},
            {"key", m.key},
            {"index", m.index},
            {"index_kind", time_kind_name(m.index_kind)},
            {"coords", {m.coords.x, m.coords.y}},
            {"coord_mode", coord_mode_name(m.coord_mode)},
            {"interval", m.interval ? json(*m.interval) : json(nullptr)},
            {"spatial_schema", schema_json(spatial.schema())},
            {"temporal_schema", schema_json(temporal.schema())}};
  std::ofstream out(dir / "meta.json");
  if (!out) throw Error("cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << '\n';
  write_csv(spatial, dir / "spatial.csv");
  write_csv(temporal, dir / "temporal.csv");
}

void save_bundle(const TemporalTable& cubble, const std::filesystem::path& dir) {
  save_bundle(face_spatial(cubble), dir);
}

SpatialTable load_bundle(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  std::ifstream in(meta_path);
  if (!in) throw Error("cannot open " + meta_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(meta_path.string() + ": " + e.what());
  }
  try {
    if (j.value("format", "") != "cubble-bundle") throw Error(meta_path.string() + " is not a cubble bundle");
    if (j.value("version", 0) != kBundleVersion)
      throw Error(meta_path.string() + ": unsupported bundle version " + j.at("version").dump());
    CubbleMeta m;
    m.key = j.at("key").get<std::string>();
    m.index = j.at("index").get<std::string>();
    const auto tk = parse_time_kind(j.at("index_kind").get<std::string>());
    const auto mode = parse_coord_mode(j.at("coord_mode").get<std::string>());
    if (!tk || !mode) throw Error(meta_path.string() + ": bad index_kind or coord_mode");
    m.index_kind = *tk;
    m.coord_mode = *mode;
    const auto& coords = j.at("coords");
    if (!coords.is_array() || coords.size() != 2) throw Error(meta_path.string() + ": coords must list two columns");
    m.coords = {coords[0].get<std::string>(), coords[1].get<std::string>()};
    if (j.contains("interval") && !j["interval"].is_null()) m.interval = j["interval"].get<std::int64_t>();

    const Schema spatial_schema = schema_from(j.at("spatial_schema"), meta_path.string());
    const Schema temporal_schema = schema_from(j.at("temporal_schema"), meta_path.string());
    Table spatial = read_csv(dir / "spatial.csv", spatial_schema);
    Table temporal = read_csv(dir / "temporal.csv", temporal_schema);
    check_columns(spatial, spatial_schema, "spatial.csv");
    check_columns(temporal, temporal_schema, "temporal.csv");
    return face_spatial(TemporalTable::create(std::move(temporal), std::move(spatial), std::move(m)));
  } catch (const json::exception& e) {
    throw Error(meta_path.string() + ": " + e.what());
  }
}

}  // namespace cubble
