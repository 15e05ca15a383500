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

#include <string>

#include "cubble/cubble.hpp"

namespace cubble {

/// "prcp [dbl]" style type tag; time columns show their time kind.
std::string type_tag(const Field& f);

/// Three header lines describing a cubble face, each ending in a newline.
std::string describe(const SpatialTable& s);
std::string describe(const TemporalTable& t);

/// Plain-text preview of the first `max_rows` rows with a type row under
/// the column names.
std::string preview(const Table& t, std::size_t max_rows = 10);

}  // namespace cubble
