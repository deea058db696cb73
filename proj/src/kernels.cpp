#include "sparsedyn/kernels.hpp"

namespace sparsedyn::kernels {

const Ops* avx2_ops();  // defined in kernels_avx2.cpp, null if not built
const Ops* neon_ops();  // defined in kernels_neon.cpp, null if not built

namespace {

bool cpu_has_avx2_fma() {
#if defined(SPARSEDYN_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Selected {
  const Ops* ops;
  Backend backend;
};

Selected select_default() {
  if (const Ops* ops = neon_ops()) return {ops, Backend::neon};
  if (cpu_has_avx2_fma()) {
    if (const Ops* ops = avx2_ops()) return {ops, Backend::avx2};
  }
  return {&scalar_ops(), Backend::scalar};
}

Selected& current() {
  static Selected sel = select_default();
  return sel;
}

}  // namespace

const Ops& active() { return *current().ops; }

Backend active_backend() { return current().backend; }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool force_backend(Backend b) {
  switch (b) {
    case Backend::scalar:
      current() = {&scalar_ops(), Backend::scalar};
      return true;
    case Backend::avx2:
      if (cpu_has_avx2_fma()) {
        if (const Ops* ops = avx2_ops()) {
          current() = {ops, Backend::avx2};
          return true;
        }
      }
      return false;
    case Backend::neon:
      if (const Ops* ops = neon_ops()) {
        current() = {ops, Backend::neon};
        return true;
      }
      return false;
  }
  return false;
}

}  // namespace sparsedyn::kernels
