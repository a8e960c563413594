#include "atlift/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace atlift::simd {

namespace {

const Kernels& resolve() {
  const char* want = std::getenv("ATLIFT_SIMD");
  if (want && std::strcmp(want, "scalar") == 0) return scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
  if (want && std::strcmp(want, "avx2") == 0 && avx2_available())
    return avx2_kernels();
  if ((!want || std::strcmp(want, "auto") == 0) && avx2_available())
    return avx2_kernels();
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
  if (!want || std::strcmp(want, "auto") == 0 ||
      std::strcmp(want, "neon") == 0)
    return neon_kernels();
#endif
  return scalar_kernels();
}

} // namespace

const Kernels& active() {
  static const Kernels& k = resolve();
  return k;
}

} // namespace atlift::simd
