#pragma once

#include <cstddef>
#include <string_view>

// Low-level array kernels used by the solvers. Every kernel has a scalar
// reference implementation plus optional SIMD variants (AVX2 on x86-64, NEON
// on aarch64). The variant is picked once at runtime from CPU capabilities;
// tests can pin a specific backend to compare outputs.
namespace sparsedyn::kernels {

enum class Backend { scalar, avx2, neon };

struct Ops {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // sum_i x[i]^2
  double (*sumsq)(const double* x, std::size_t n);
  // out[i] = sign(v[i]) * max(|v[i]| - t[i], 0); exact zero when shrunk away
  void (*soft_threshold)(const double* v, const double* t, double* out, std::size_t n);
};

// Currently selected implementation (runtime CPU dispatch on first use).
const Ops& active();
Backend active_backend();
std::string_view backend_name(Backend b);

// Reference implementation, always available.
const Ops& scalar_ops();

// Returns true if the requested backend is available on this machine and is
// now active. Intended for equivalence tests; not thread-safe.
bool force_backend(Backend b);

// Convenience wrappers through the active backend.
inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void scal(double a, double* x, std::size_t n) { active().scal(a, x, n); }
inline double sumsq(const double* x, std::size_t n) { return active().sumsq(x, n); }
inline void soft_threshold(const double* v, const double* t, double* out, std::size_t n) {
  active().soft_threshold(v, t, out, n);
}

}  // namespace sparsedyn::kernels
