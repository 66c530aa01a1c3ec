#include <cstdlib>
#include <string>

#include "fpnni/error.hpp"
#include "fpnni/simd/kernels.hpp"

namespace fpnni::simd {

namespace {

bool cpu_has_avx2() {
#if defined(FPNNI_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& best_available() {
#if defined(FPNNI_HAVE_AVX2)
  if (cpu_has_avx2()) return detail::kAvx2Table;
#endif
#if defined(FPNNI_HAVE_NEON)
  return detail::kNeonTable;
#endif
  return detail::kScalarTable;
}

const KernelTable& select() {
  const char* env = std::getenv("FPNNI_SIMD");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return detail::kScalarTable;
  if (choice == "avx2" && available(Backend::Avx2)) return kernels_for(Backend::Avx2);
  if (choice == "neon" && available(Backend::Neon)) return kernels_for(Backend::Neon);
  return best_available();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& table = select();
  return table;
}

bool available(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
    case Backend::Neon:
#if defined(FPNNI_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Backend b) {
  if (!available(b)) {
    throw InvalidArgument("SIMD backend " + std::string(to_string(b)) + " is not available");
  }
  switch (b) {
    case Backend::Scalar: return detail::kScalarTable;
#if defined(FPNNI_HAVE_AVX2)
    case Backend::Avx2: return detail::kAvx2Table;
#endif
#if defined(FPNNI_HAVE_NEON)
    case Backend::Neon: return detail::kNeonTable;
#endif
    default: break;
  }
  return detail::kScalarTable;
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

}  // namespace fpnni::simd
