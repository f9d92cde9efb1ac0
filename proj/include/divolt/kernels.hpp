#pragma once

#include <cstddef>

// Data-parallel inner loops behind a runtime-dispatched table. Scalar versions
// are the reference semantics; vector variants must agree to tight relative
// tolerance (they may reassociate sums). The active table is fixed for the
// lifetime of the process, so repeated runs on one machine are reproducible.

namespace divolt::kern {

struct Ops {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out = { sum a^2, sum a*b, sum b^2 }
  void (*outer2)(const double* a, const double* b, std::size_t n, double out[3]);
  // out = { sum u^2 a^2, sum u^2 a*b, sum u^2 b^2 }
  void (*weighted_outer2)(const double* u, const double* a, const double* b,
                          std::size_t n, double out[3]);
  // out[i] = sum_{j<k} w[j] * x[i+j], for i = 0..n-k
  void (*weighted_moving_sum)(const double* x, std::size_t n, const double* w,
                              std::size_t k, double* out);
  // out[i] = |v[i]|^l * |v[i+gap]|^r with either factor's whole term zeroed
  // when its |.| >= threshold; i = 0..count-1. Supports l, r in {1, 2}.
  void (*pair_products)(const double* v, std::size_t count, std::size_t gap,
                        int l, int r, double threshold, double* out);
  const char* name;
};

// Table selected at first use: DIVOLT_KERNELS environment override
// ("scalar", "avx2", "neon"), else best available for the CPU.
const Ops& active();

const Ops& scalar_ops();
#if defined(DIVOLT_AVX2_TU)
const Ops& avx2_ops();
bool avx2_supported();
#endif
#if defined(DIVOLT_NEON_TU)
const Ops& neon_ops();
#endif

}  // namespace divolt::kern
