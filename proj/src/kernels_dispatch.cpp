#include <cstdlib>
#include <cstring>

#include "divolt/kernels.hpp"

namespace divolt::kern {

namespace {

const Ops* select() {
  const char* pref = std::getenv("DIVOLT_KERNELS");
  if (pref != nullptr) {
    if (std::strcmp(pref, "scalar") == 0) return &scalar_ops();
#if defined(DIVOLT_AVX2_TU)
    if (std::strcmp(pref, "avx2") == 0 && avx2_supported()) return &avx2_ops();
#endif
#if defined(DIVOLT_NEON_TU)
    if (std::strcmp(pref, "neon") == 0) return &neon_ops();
#endif
    return &scalar_ops();
  }
#if defined(DIVOLT_AVX2_TU)
  if (avx2_supported()) return &avx2_ops();
#endif
#if defined(DIVOLT_NEON_TU)
  return &neon_ops();
#endif
  return &scalar_ops();
}

}  // namespace

const Ops& active() {
  static const Ops* chosen = select();
  return *chosen;
}

}  // namespace divolt::kern
