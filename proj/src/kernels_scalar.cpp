#include <cmath>
#include <cstddef>

#include "sparsedyn/kernels.hpp"

namespace sparsedyn::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sumsq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void soft_threshold_scalar(const double* v, const double* t, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(v[i]) - t[i];
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{dot_scalar, axpy_scalar, scal_scalar, sumsq_scalar,
                       soft_threshold_scalar};
  return ops;
}

}  // namespace sparsedyn::kernels
