#include <immintrin.h>

#include <cassert>
#include <cmath>

#include "divolt/kernels.hpp"

namespace divolt::kern {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void outer2_avx2(const double* a, const double* b, std::size_t n, double out[3]) {
  __m256d saa = _mm256_setzero_pd();
  __m256d sab = _mm256_setzero_pd();
  __m256d sbb = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    saa = _mm256_fmadd_pd(va, va, saa);
    sab = _mm256_fmadd_pd(va, vb, sab);
    sbb = _mm256_fmadd_pd(vb, vb, sbb);
  }
  double raa = hsum(saa), rab = hsum(sab), rbb = hsum(sbb);
  for (; i < n; ++i) {
    raa += a[i] * a[i];
    rab += a[i] * b[i];
    rbb += b[i] * b[i];
  }
  out[0] = raa;
  out[1] = rab;
  out[2] = rbb;
}

void weighted_outer2_avx2(const double* u, const double* a, const double* b,
                          std::size_t n, double out[3]) {
  __m256d saa = _mm256_setzero_pd();
  __m256d sab = _mm256_setzero_pd();
  __m256d sbb = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vu = _mm256_loadu_pd(u + i);
    const __m256d w = _mm256_mul_pd(vu, vu);
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d wa = _mm256_mul_pd(w, va);
    const __m256d wb = _mm256_mul_pd(w, vb);
    saa = _mm256_fmadd_pd(wa, va, saa);
    sab = _mm256_fmadd_pd(wa, vb, sab);
    sbb = _mm256_fmadd_pd(wb, vb, sbb);
  }
  double raa = hsum(saa), rab = hsum(sab), rbb = hsum(sbb);
  for (; i < n; ++i) {
    const double w = u[i] * u[i];
    raa += w * a[i] * a[i];
    rab += w * a[i] * b[i];
    rbb += w * b[i] * b[i];
  }
  out[0] = raa;
  out[1] = rab;
  out[2] = rbb;
}

void weighted_moving_sum_avx2(const double* x, std::size_t n, const double* w,
                              std::size_t k, double* out) {
  assert(k >= 1 && k <= n);
  const std::size_t count = n - k + 1;
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < k; ++j) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(w[j]), _mm256_loadu_pd(x + i + j), acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < count; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += w[j] * x[i + j];
    out[i] = s;
  }
}

inline __m256d pow_lr(__m256d av, int p) { return p == 1 ? av : _mm256_mul_pd(av, av); }

void pair_products_avx2(const double* v, std::size_t count, std::size_t gap,
                        int l, int r, double threshold, double* out) {
  assert((l == 1 || l == 2) && (r == 1 || r == 2));
  const __m256d thr = _mm256_set1_pd(threshold);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d ax = abs_pd(_mm256_loadu_pd(v + i));
    const __m256d ay = abs_pd(_mm256_loadu_pd(v + i + gap));
    const __m256d keep = _mm256_and_pd(_mm256_cmp_pd(ax, thr, _CMP_LT_OQ),
                                       _mm256_cmp_pd(ay, thr, _CMP_LT_OQ));
    const __m256d prod = _mm256_mul_pd(pow_lr(ax, l), pow_lr(ay, r));
    _mm256_storeu_pd(out + i, _mm256_and_pd(prod, keep));
  }
  for (; i < count; ++i) {
    const double ax = std::fabs(v[i]);
    const double ay = std::fabs(v[i + gap]);
    const bool keep = ax < threshold && ay < threshold;
    const double px = l == 1 ? ax : ax * ax;
    const double py = r == 1 ? ay : ay * ay;
    out[i] = keep ? px * py : 0.0;
  }
}

}  // namespace

bool avx2_supported() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }

const Ops& avx2_ops() {
  static const Ops ops = {dot_avx2,
                          outer2_avx2,
                          weighted_outer2_avx2,
                          weighted_moving_sum_avx2,
                          pair_products_avx2,
                          "avx2"};
  return ops;
}

}  // namespace divolt::kern
