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
#include <cctype>
#include <cstdint>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cubble/error.hpp"

namespace cubble {

namespace {

std::vector<std::string> distinct_keys(const Column& col) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col.is_missing(i)) continue;
    std::string k = col.cell_text(i);
    if (seen.insert(k).second) out.push_back(std::move(k));
  }
  return out;
}

std::set<std::string> tokens(const std::string& normalized) {
  std::set<std::string> out;
  std::istringstream in(normalized);
  std::string tok;
  while (in >> tok) out.insert(tok);
  return out;
}

bool is_subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Table pair_table(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::string> s, t;
  for (const auto& [a, b] : pairs) {
    s.push_back(a);
    t.push_back(b);
  }
  return Table({Column::of_texts("spatial", std::move(s)), Column::of_texts("temporal", std::move(t))});
}

}  // namespace

std::string normalize_key(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else if (std::ispunct(c)) {
      continue;
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 && m == 0) return 1.0;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

double candidate_score(std::string_view spatial_key, std::string_view temporal_key) {
  const std::string a = normalize_key(spatial_key);
  const std::string b = normalize_key(temporal_key);
  if (a.empty() || b.empty()) return -1.0;
  const double sim = levenshtein_similarity(a, b);
  const bool prefix = a.starts_with(b) || b.starts_with(a);
  const auto ta = tokens(a), tb = tokens(b);
  const bool subset = is_subset(ta, tb) || is_subset(tb, ta);
  if (prefix || subset || sim >= kKeySimilarityThreshold) return sim;
  return -1.0;
}

KeyReport check_key(const Table& spatial, const Table& temporal, const KeyMapping& by) {
  const auto sk = distinct_keys(spatial.column(by.spatial));
  const auto tk = distinct_keys(temporal.column(by.temporal));

  std::unordered_set<std::string> tset(tk.begin(), tk.end());
  std::unordered_set<std::string> sset(sk.begin(), sk.end());

  std::vector<std::pair<std::string, std::string>> paired;
  std::vector<std::string> rest_s, rest_t;
  for (const auto& k : sk) {
    if (tset.contains(k)) {
      paired.emplace_back(k, k);
    } else {
      rest_s.push_back(k);
    }
  }
  for (const auto& k : tk)
    if (!sset.contains(k)) rest_t.push_back(k);

  struct Candidate {
    double score;
    std::size_t s, t;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < rest_s.size(); ++i)
    for (std::size_t j = 0; j < rest_t.size(); ++j) {
      double sc = candidate_score(rest_s[i], rest_t[j]);
      if (sc >= 0.0) cands.push_back({sc, i, j});
    }
  std::sort(cands.begin(), cands.end(), [&](const Candidate& x, const Candidate& y) {
    if (x.score != y.score) return x.score > y.score;
    // Ties break on the unordered key pair.
    const auto& [xa, xb] = std::minmax(rest_s[x.s], rest_t[x.t]);
    const auto& [ya, yb] = std::minmax(rest_s[y.s], rest_t[y.t]);
    if (xa != ya) return xa < ya;
    return xb < yb;
  });

  std::vector<char> used_s(rest_s.size(), 0), used_t(rest_t.size(), 0);
  std::vector<std::size_t> partner(rest_s.size(), SIZE_MAX);
  for (const auto& c : cands) {
    if (used_s[c.s] || used_t[c.t]) continue;
    used_s[c.s] = used_t[c.t] = 1;
    partner[c.s] = c.t;
  }

  KeyReport report;
  std::vector<std::pair<std::string, std::string>> potential;
  for (std::size_t i = 0; i < rest_s.size(); ++i) {
    if (partner[i] != SIZE_MAX) {
      potential.emplace_back(rest_s[i], rest_t[partner[i]]);
    } else {
      report.others_spatial.push_back(rest_s[i]);
    }
  }
  for (std::size_t j = 0; j < rest_t.size(); ++j)
    if (!used_t[j]) report.others_temporal.push_back(rest_t[j]);

  report.paired = pair_table(paired);
  report.potential_pairs = pair_table(potential);
  return report;
}

}  // namespace cubble
