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

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace cubble::simd::detail {

namespace {

MinMax minmax_scalar(const double* v, std::size_t n) {
  MinMax m{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v[i];
    if (std::isnan(x)) continue;
    if (x < m.min) m.min = x;
    if (x > m.max) m.max = x;
    ++m.count;
  }
  return m;
}

void rescale_scalar(const double* v, std::size_t n, double lo, double span, double mul, double add, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (v[i] - lo) / span;
    const double p = q * mul;
    out[i] = p + add;
  }
}

void euclid_row_scalar(double x0, double y0, const double* xs, const double* ys, std::size_t n, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = xs[j] - x0;
    const double dy = ys[j] - y0;
    const double sx = dx * dx;
    const double sy = dy * dy;
    out[j] = std::sqrt(sx + sy);
  }
}

void peak_mask_scalar(const double* v, std::size_t n, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (v[i] > v[i - 1] && v[i] > v[i + 1]) ? 1 : 0;
}

}  // namespace

const Kernels& scalar_table() {
  static const Kernels k{Isa::Scalar, minmax_scalar, rescale_scalar, euclid_row_scalar, peak_mask_scalar};
  return k;
}

}  // namespace cubble::simd::detail
