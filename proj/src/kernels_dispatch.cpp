#include <cstdlib>
#include <string_view>

#include "llab/kernels.hpp"

namespace llab::kernels {

#if LLAB_HAVE_AVX2
const Kernels* avx2_table();  // kernels_avx2.cpp
#endif

const Kernels* avx2() {
#if LLAB_HAVE_AVX2
  return avx2_table();
#else
  return nullptr;
#endif
}

const Kernels& active() {
  static const Kernels& selected = []() -> const Kernels& {
    if (const char* env = std::getenv("LLAB_SIMD")) {
      const std::string_view v(env);
      if (v == "scalar") return scalar();
      if (v == "avx2") {
        if (const Kernels* k = avx2()) return *k;
        return scalar();  // requested lane unavailable; fall back
      }
    }
    if (const Kernels* k = avx2()) return *k;
    return scalar();
  }();
  return selected;
}

}  // namespace llab::kernels
