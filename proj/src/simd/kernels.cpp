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

#include <cstdlib>
#include <string>

#include "cubble/error.hpp"
#include "kernels_internal.hpp"

namespace cubble::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "scalar";
}

const Kernels& scalar_kernels() { return detail::scalar_table(); }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(CUBBLE_WITH_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_available(isa)) throw Error("SIMD variant '" + std::string(isa_name(isa)) + "' is not available");
#if defined(CUBBLE_WITH_AVX2)
  if (isa == Isa::Avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

namespace {

const Kernels& choose() {
  if (const char* env = std::getenv("CUBBLE_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return detail::scalar_table();
    if (want == "avx2" && isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  }
  if (isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  return detail::scalar_table();
}

}  // namespace

const Kernels& active() {
  static const Kernels& k = choose();
  return k;
}

MinMax minmax(std::span<const double> v) { return active().minmax(v.data(), v.size()); }

void rescale(std::span<const double> v, double lo, double span, double mul, double add, std::span<double> out) {
  if (out.size() < v.size()) throw Error("rescale: output shorter than input");
  active().rescale(v.data(), v.size(), lo, span, mul, add, out.data());
}

void euclid_row(double x0, double y0, std::span<const double> xs, std::span<const double> ys, std::span<double> out) {
  if (xs.size() != ys.size() || out.size() < xs.size()) throw Error("euclid_row: mismatched lengths");
  active().euclid_row(x0, y0, xs.data(), ys.data(), xs.size(), out.data());
}

void peak_mask(std::span<const double> v, std::span<std::uint8_t> out) {
  if (out.size() < v.size()) throw Error("peak_mask: output shorter than input");
  active().peak_mask(v.data(), v.size(), out.data());
}

}  // namespace cubble::simd
