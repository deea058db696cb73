// NEON variants for aarch64. Double-precision NEON is baseline on aarch64, so
// no runtime feature probe is needed there.
#include "sparsedyn/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace sparsedyn::kernels {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
  }
  double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_neon(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

double sumsq_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void soft_threshold_neon(const double* v, const double* t, double* out, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const uint64x2_t signbit = vdupq_n_u64(0x8000000000000000ULL);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vv = vld1q_f64(v + i);
    const float64x2_t shrunk = vmaxq_f64(vsubq_f64(vabsq_f64(vv), vld1q_f64(t + i)), zero);
    const uint64x2_t alive = vcgtq_f64(shrunk, zero);
    const uint64x2_t sgn = vandq_u64(vandq_u64(vreinterpretq_u64_f64(vv), signbit), alive);
    vst1q_f64(out + i, vreinterpretq_f64_u64(vorrq_u64(vreinterpretq_u64_f64(shrunk), sgn)));
  }
  for (; i < n; ++i) {
    const double a = std::fabs(v[i]) - t[i];
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
}

}  // namespace

const Ops* neon_ops() {
  static const Ops ops{dot_neon, axpy_neon, scal_neon, sumsq_neon, soft_threshold_neon};
  return &ops;
}

}  // namespace sparsedyn::kernels

#else

namespace sparsedyn::kernels {
const Ops* neon_ops() { return nullptr; }
}  // namespace sparsedyn::kernels

#endif
