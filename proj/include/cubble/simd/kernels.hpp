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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace cubble::simd {

enum class Isa : std::uint8_t { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

struct MinMax {
  double min;
  double max;
  /// Number of non-NaN values seen; min/max are meaningless when zero.
  std::size_t count;
};

/// Kernel table. Every variant produces bit-identical results: no fused
/// multiply-add, IEEE division and square root only.
struct Kernels {
  Isa isa;
  /// Minimum and maximum over non-NaN values.
  MinMax (*minmax)(const double* v, std::size_t n);
  /// out[i] = ((v[i] - lo) / span) * mul + add. NaN propagates.
  void (*rescale)(const double* v, std::size_t n, double lo, double span, double mul, double add, double* out);
  /// out[j] = sqrt((xs[j] - x0)^2 + (ys[j] - y0)^2).
  void (*euclid_row)(double x0, double y0, const double* xs, const double* ys, std::size_t n, double* out);
  /// out[i] = 1 when v[i] is a strict local maximum with both neighbours
  /// present; ends and any NaN comparison yield 0. Requires n >= 1.
  void (*peak_mask)(const double* v, std::size_t n, std::uint8_t* out);
};

const Kernels& scalar_kernels();
bool isa_available(Isa isa);
/// Kernels for `isa`; throws Error when the CPU or build lacks it.
const Kernels& kernels_for(Isa isa);

/// Best available kernels, chosen once. CUBBLE_SIMD=scalar|avx2 overrides.
const Kernels& active();

// Span conveniences over active().
MinMax minmax(std::span<const double> v);
void rescale(std::span<const double> v, double lo, double span, double mul, double add, std::span<double> out);
void euclid_row(double x0, double y0, std::span<const double> xs, std::span<const double> ys, std::span<double> out);
void peak_mask(std::span<const double> v, std::span<std::uint8_t> out);

}  // namespace cubble::simd
