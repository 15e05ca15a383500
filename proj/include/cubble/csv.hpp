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
#include <iosfwd>
#include <string>
#include <string_view>

#include "cubble/table.hpp"

namespace cubble {

/// RFC 4180 reader. Column types come from `schema` when it names the
/// column, otherwise the first kind every non-empty field parses as:
/// int, dbl, ISO date, ISO datetime, lgl ("true"/"false"), chr.
///
/// An unquoted empty field is Missing. A quoted field is always text, so a
/// column with any quoted field is chr.
Table parse_csv(std::string_view text, const Schema& schema = {});
Table read_csv(const std::filesystem::path& path, const Schema& schema = {});

/// Writes a table that parse_csv reads back to an equal table: whole
/// doubles keep a ".0", and text that would read as another kind is quoted.
/// Nested columns are rejected.
void write_csv(const Table& table, std::ostream& out);
void write_csv(const Table& table, const std::filesystem::path& path);
std::string to_csv(const Table& table);

}  // namespace cubble
