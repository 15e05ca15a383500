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

#include <filesystem>

#include "cubble/cubble.hpp"

namespace cubble {

// A bundle is a directory holding meta.json, spatial.csv (one row per site)
// and temporal.csv (long form: key, index, temporal columns). Column types
// are recorded in meta.json so values read back unchanged.

void save_bundle(const SpatialTable& cubble, const std::filesystem::path& dir);
void save_bundle(const TemporalTable& cubble, const std::filesystem::path& dir);
SpatialTable load_bundle(const std::filesystem::path& dir);

}  // namespace cubble
