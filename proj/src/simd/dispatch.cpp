#include <cstdlib>
#include <string_view>

#include "kljn/simd/kernels.hpp"

namespace kljn::simd {

#if defined(KLJN_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernels_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(KLJN_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &avx2_kernels_table();
#endif
  return nullptr;
}

const KernelTable& kernels() {
  static const KernelTable* active = [] {
    const char* forced = std::getenv("KLJN_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return &scalar_kernels();
    if (const KernelTable* vec = avx2_kernels()) return vec;
    return &scalar_kernels();
  }();
  return *active;
}

}  // namespace kljn::simd
