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
#include <string_view>
#include <vector>

#include "cubble/table.hpp"

namespace cubble {

/// Which column carries the site identifier on each side.
struct KeyMapping {
  std::string spatial;
  std::string temporal;
};

/// Outcome of reconciling spatial and temporal key values.
///
/// paired and potential_pairs are two-column text tables (spatial, temporal).
/// Every distinct key of a side lands in exactly one of: paired,
/// potential_pairs, or that side's others list.
struct KeyReport {
  Table paired;
  Table potential_pairs;
  std::vector<std::string> others_spatial;
  std::vector<std::string> others_temporal;

  bool all_paired() const {
    return potential_pairs.num_rows() == 0 && others_spatial.empty() && others_temporal.empty();
  }
};

KeyReport check_key(const Table& spatial, const Table& temporal, const KeyMapping& by);

/// Lowercase, punctuation removed, whitespace collapsed to single spaces.
std::string normalize_key(std::string_view raw);

/// 1 - levenshtein(a, b) / max(|a|, |b|); 1 for two empty strings.
double levenshtein_similarity(std::string_view a, std::string_view b);

/// Similarity score of two raw keys when they qualify as a potential pair,
/// or a negative value when they do not.
double candidate_score(std::string_view spatial_key, std::string_view temporal_key);

inline constexpr double kKeySimilarityThreshold = 0.8;

}  // namespace cubble
