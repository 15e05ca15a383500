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

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace cubble::simd::detail {

namespace {

MinMax minmax_avx2(const double* v, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  __m256d vmin = _mm256_set1_pd(inf);
  __m256d vmax = _mm256_set1_pd(-inf);
  __m256i vcount = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    const __m256d ok = _mm256_cmp_pd(x, x, _CMP_ORD_Q);
    // NaN lanes are replaced by the identity of each reduction.
    vmin = _mm256_min_pd(vmin, _mm256_blendv_pd(_mm256_set1_pd(inf), x, ok));
    vmax = _mm256_max_pd(vmax, _mm256_blendv_pd(_mm256_set1_pd(-inf), x, ok));
    vcount = _mm256_sub_epi64(vcount, _mm256_castpd_si256(ok));
  }
  alignas(32) double mins[4], maxs[4];
  alignas(32) std::int64_t counts[4];
  _mm256_store_pd(mins, vmin);
  _mm256_store_pd(maxs, vmax);
  _mm256_store_si256(reinterpret_cast<__m256i*>(counts), vcount);
  MinMax m{inf, -inf, 0};
  for (int k = 0; k < 4; ++k) {
    if (mins[k] < m.min) m.min = mins[k];
    if (maxs[k] > m.max) m.max = maxs[k];
    m.count += static_cast<std::size_t>(counts[k]);
  }
  for (; i < n; ++i) {
    const double x = v[i];
    if (std::isnan(x)) continue;
    if (x < m.min) m.min = x;
    if (x > m.max) m.max = x;
    ++m.count;
  }
  return m;
}

void rescale_avx2(const double* v, std::size_t n, double lo, double span, double mul, double add, double* out) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vspan = _mm256_set1_pd(span);
  const __m256d vmul = _mm256_set1_pd(mul);
  const __m256d vadd = _mm256_set1_pd(add);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d q = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), vlo), vspan);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(q, vmul), vadd));
  }
  for (; i < n; ++i) {
    const double q = (v[i] - lo) / span;
    const double p = q * mul;
    out[i] = p + add;
  }
}

void euclid_row_avx2(double x0, double y0, const double* xs, const double* ys, std::size_t n, double* out) {
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vy0 = _mm256_set1_pd(y0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + j), vx0);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + j), vy0);
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + j, _mm256_sqrt_pd(s));
  }
  for (; j < n; ++j) {
    const double dx = xs[j] - x0;
    const double dy = ys[j] - y0;
    const double sx = dx * dx;
    const double sy = dy * dy;
    out[j] = std::sqrt(sx + sy);
  }
}

void peak_mask_avx2(const double* v, std::size_t n, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0;
  if (n < 3) return;
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d c = _mm256_loadu_pd(v + i);
    const __m256d gl = _mm256_cmp_pd(c, _mm256_loadu_pd(v + i - 1), _CMP_GT_OQ);
    const __m256d gr = _mm256_cmp_pd(c, _mm256_loadu_pd(v + i + 1), _CMP_GT_OQ);
    const int bits = _mm256_movemask_pd(_mm256_and_pd(gl, gr));
    for (int k = 0; k < 4; ++k) out[i + k] = static_cast<std::uint8_t>((bits >> k) & 1);
  }
  for (; i + 1 < n; ++i) out[i] = (v[i] > v[i - 1] && v[i] > v[i + 1]) ? 1 : 0;
}

}  // namespace

const Kernels& avx2_table() {
  static const Kernels k{Isa::Avx2, minmax_avx2, rescale_avx2, euclid_row_avx2, peak_mask_avx2};
  return k;
}

}  // namespace cubble::simd::detail
