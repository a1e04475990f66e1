#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace voxmetric::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(VOXMETRIC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* env = std::getenv("VOXMETRIC_SIMD");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return detail::scalar_table();
  if (const KernelTable* avx2 = kernels_for(Backend::Avx2)) return *avx2;
  return detail::scalar_table();
}

}  // namespace

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* kernels_for(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return &detail::scalar_table();
    case Backend::Avx2:
#if defined(VOXMETRIC_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_table();
#endif
      return nullptr;
  }
  return nullptr;
}

const KernelTable& kernels() {
  static const KernelTable& active = select();
  return active;
}

Backend active_backend() { return kernels().backend; }

}  // namespace voxmetric::simd
