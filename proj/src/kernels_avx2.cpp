// AVX2 + FMA variants. This file is the only one compiled with -mavx2; it is
// entered only after the dispatcher has confirmed CPU support at runtime.
#include "sparsedyn/kernels.hpp"

#if defined(SPARSEDYN_BUILD_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace sparsedyn::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swap = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

double sumsq_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void soft_threshold_avx2(const double* v, const double* t, double* out, std::size_t n) {
  const __m256d signbit = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vv = _mm256_loadu_pd(v + i);
    const __m256d mag = _mm256_andnot_pd(signbit, vv);
    const __m256d shrunk = _mm256_max_pd(_mm256_sub_pd(mag, _mm256_loadu_pd(t + i)), zero);
    // reattach the sign only where something survived, so zeros are +0.0
    const __m256d alive = _mm256_cmp_pd(shrunk, zero, _CMP_GT_OQ);
    const __m256d sgn = _mm256_and_pd(_mm256_and_pd(vv, signbit), alive);
    _mm256_storeu_pd(out + i, _mm256_or_pd(shrunk, sgn));
  }
  for (; i < n; ++i) {
    const double a = std::fabs(v[i]) - t[i];
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops{dot_avx2, axpy_avx2, scal_avx2, sumsq_avx2, soft_threshold_avx2};
  return &ops;
}

}  // namespace sparsedyn::kernels

#else

namespace sparsedyn::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace sparsedyn::kernels

#endif
