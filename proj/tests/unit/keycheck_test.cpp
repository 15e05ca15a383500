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

#include "cubble/keycheck.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "cubble/csv.hpp"
#include "cubble/error.hpp"
#include "random_cubble.hpp"

namespace cubble {
namespace {

using testing::fixture;

std::vector<std::pair<std::string, std::string>> rows(const Table& t) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < t.num_rows(); ++i) out.emplace_back(t.column(0).text(i), t.column(1).text(i));
  return out;
}

Table keys(const std::string& name, std::vector<std::string> values) {
  return Table({Column::of_texts(name, std::move(values))});
}

TEST(Normalize, LowercasesStripsAndCollapses) {
  EXPECT_EQ(normalize_key("  Kingston (C)   (Vic.) "), "kingston c vic");
  EXPECT_EQ(normalize_key("Colac-Otway"), "colacotway");
}

TEST(Levenshtein, KnownValues) {
  EXPECT_DOUBLE_EQ(levenshtein_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(levenshtein_similarity("kitten", "sitting"), 1.0 - 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(levenshtein_similarity("abc", "abc"), 1.0);
}

TEST(CheckKey, LgaFixture) {
  const KeyReport r = check_key(read_csv(fixture("lga_spatial.csv")), read_csv(fixture("lga_covid.csv")),
                                {"lga_name_2018", "lga"});
  EXPECT_EQ(r.paired.num_rows(), 78u);
  EXPECT_EQ(rows(r.potential_pairs), (std::vector<std::pair<std::string, std::string>>{
                                         {"Kingston (C) (Vic.)", "Kingston (C)"}, {"Latrobe (C) (Vic.)", "Latrobe (C)"}}));
  EXPECT_TRUE(r.others_spatial.empty());
  EXPECT_EQ(r.others_temporal, (std::vector<std::string>{"Interstate", "Overseas", "Unknown"}));
  EXPECT_EQ(r.paired.names(), (std::vector<std::string>{"spatial", "temporal"}));
}

TEST(CheckKey, IdenticalSetsAllPaired) {
  const KeyReport r = check_key(keys("k", {"a", "b"}), keys("k", {"b", "a", "a"}), {"k", "k"});
  EXPECT_TRUE(r.all_paired());
  EXPECT_EQ(r.paired.num_rows(), 2u);
}

TEST(CheckKey, DisjointDissimilarSetsAreOthers) {
  const std::vector<std::string> a{"Alpha", "Bravo", "Charlie"}, b{"Xray", "Yankee", "Zulu"};
  for (const auto& x : a)
    for (const auto& y : b) ASSERT_LT(candidate_score(x, y), 0.0) << x << " / " << y;
  const KeyReport r = check_key(keys("k", a), keys("k", b), {"k", "k"});
  EXPECT_EQ(r.paired.num_rows(), 0u);
  EXPECT_EQ(r.potential_pairs.num_rows(), 0u);
  EXPECT_EQ(r.others_spatial, a);
  EXPECT_EQ(r.others_temporal, b);
}

TEST(CheckKey, IntegerKeysComparedAsText) {
  const Table s({Column::of_ints("id", {1, 2})});
  const Table t({Column::of_texts("id", {"1", "3"})});
  const KeyReport r = check_key(s, t, {"id", "id"});
  EXPECT_EQ(rows(r.paired), (std::vector<std::pair<std::string, std::string>>{{"1", "1"}}));
}

TEST(CheckKey, MissingColumn) { EXPECT_THROW(check_key(keys("a", {"x"}), keys("b", {"x"}), {"a", "a"}), Error); }

TEST(CheckKey, CandidateRules) {
  EXPECT_GE(candidate_score("Kingston (C) (Vic.)", "Kingston (C)"), 0.0);  // prefix
  EXPECT_GE(candidate_score("Greater Geelong (C)", "Geelong Greater"), 0.0);  // token subset
  EXPECT_GE(candidate_score("Moorabool", "Moorabol"), 0.0);  // similarity 0.889
  EXPECT_LT(candidate_score("Interstate", "Overseas"), 0.0);
}

std::string random_name(std::mt19937_64& rng) {
  static const std::vector<std::string> words{"Alpine", "Ararat", "Bass", "Coast", "Glen", "Eira", "Hume", "Knox",
                                              "(C)", "(S)", "(Vic.)", "Yarra", "Ranges", "Kingston", "Latrobe"};
  std::string s;
  for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
  return s;
}

TEST(CheckKey, PartitionAndSymmetryProperties) {
  std::mt19937_64 rng(41);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<std::string> a, b;
    for (std::size_t i = 0, n = rng() % 12; i < n; ++i) a.push_back(random_name(rng));
    for (std::size_t i = 0, n = rng() % 12; i < n; ++i) b.push_back(random_name(rng));
    const KeyReport r = check_key(keys("s", a), keys("t", b), {"s", "t"});

    const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    ASSERT_EQ(r.paired.num_rows() + r.potential_pairs.num_rows() + r.others_spatial.size(), sa.size());
    ASSERT_EQ(r.paired.num_rows() + r.potential_pairs.num_rows() + r.others_temporal.size(), sb.size());
    std::set<std::string> seen_s, seen_t;
    for (const auto& [x, y] : rows(r.paired)) {
      ASSERT_EQ(x, y);
      seen_s.insert(x);
      seen_t.insert(y);
    }
    for (const auto& [x, y] : rows(r.potential_pairs)) {
      ASSERT_TRUE(seen_s.insert(x).second);
      ASSERT_TRUE(seen_t.insert(y).second);
      ASSERT_GE(candidate_score(x, y), 0.0);
    }
    for (const auto& x : r.others_spatial) ASSERT_TRUE(seen_s.insert(x).second);
    for (const auto& y : r.others_temporal) ASSERT_TRUE(seen_t.insert(y).second);
    ASSERT_EQ(seen_s, sa);
    ASSERT_EQ(seen_t, sb);

    const KeyReport swapped = check_key(keys("t", b), keys("s", a), {"t", "s"});
    auto flipped = rows(swapped.potential_pairs);
    for (auto& p : flipped) std::swap(p.first, p.second);
    auto original = rows(r.potential_pairs);
    std::sort(flipped.begin(), flipped.end());
    std::sort(original.begin(), original.end());
    EXPECT_EQ(flipped, original) << "iteration " << iter;
    auto os = r.others_spatial, ot = swapped.others_temporal;
    std::sort(os.begin(), os.end());
    std::sort(ot.begin(), ot.end());
    EXPECT_EQ(os, ot);
  }
}

}  // namespace
}  // namespace cubble
