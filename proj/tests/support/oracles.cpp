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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace cubble::testing {

double vincenty_sphere_m(double lon1, double lat1, double lon2, double lat2) {
  constexpr double kPi = 3.14159265358979323846;
  const double d2r = kPi / 180.0;
  const double p1 = lat1 * d2r, p2 = lat2 * d2r;
  const double dl = (lon2 - lon1) * d2r;
  const double a = std::cos(p2) * std::sin(dl);
  const double b = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
  const double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return 6371008.8 * std::atan2(std::sqrt(a * a + b * b), c);
}

std::vector<OracleGroup> brute_force_match(std::size_t rows, std::size_t cols, std::span<const double> dist,
                                           std::size_t n_group, std::size_t n_each) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) pairs.emplace_back(dist[i * cols + j], i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> used(rows, false);
  std::vector<OracleGroup> groups;
  for (const auto& [d, i, j] : pairs) {
    if (groups.size() == n_group) break;
    if (used[i]) continue;
    used[i] = true;
    OracleGroup g;
    g.anchor = i;
    std::vector<std::pair<double, std::size_t>> row;
    for (std::size_t k = 0; k < cols; ++k) row.emplace_back(dist[i * cols + k], k);
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < std::min(n_each, cols); ++k) {
      g.members.push_back(row[k].second);
      g.dists.push_back(row[k].first);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

namespace {

bool is_peak(std::span<const double> v, std::size_t i) {
  if (i == 0 || i + 1 >= v.size()) return false;
  if (std::isnan(v[i - 1]) || std::isnan(v[i]) || std::isnan(v[i + 1])) return false;
  return v[i] > v[i - 1] && v[i] > v[i + 1];
}

}  // namespace

std::int64_t peak_oracle(std::span<const double> x, std::span<const double> y, std::int64_t window) {
  std::int64_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!is_peak(x, i)) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const auto gap = static_cast<std::int64_t>(i > j ? i - j : j - i);
      if (gap <= window && is_peak(y, j)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

std::set<std::pair<std::string, std::int64_t>> gap_oracle(const TemporalTable& t) {
  std::map<std::string, std::set<std::int64_t>> seen;
  const Column& key = t.key_column();
  const Column& index = t.index_column();
  for (std::size_t r = 0; r < t.num_rows(); ++r) seen[key.cell_text(r)].insert(index.i64(r));
  std::int64_t step = 0;
  for (const auto& [k, s] : seen)
    for (auto it = s.begin(); it != s.end() && std::next(it) != s.end(); ++it) step = std::gcd(step, *std::next(it) - *it);
  if (step == 0) step = 1;
  std::set<std::pair<std::string, std::int64_t>> missing;
  for (const auto& [k, s] : seen) {
    if (s.empty()) continue;
    for (std::int64_t v = *s.begin(); v <= *s.rbegin(); v += step)
      if (!s.contains(v)) missing.emplace(k, v);
  }
  return missing;
}

}  // namespace cubble::testing
