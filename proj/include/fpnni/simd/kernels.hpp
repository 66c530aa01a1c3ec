#pragma once

// Data-parallel inner loops of the fractional integrator. Every kernel has a
// scalar reference implementation; vector variants (AVX2+FMA on x86-64, NEON
// on AArch64) are picked at runtime and must agree with the reference to
// rounding.
//
// Selection: FPNNI_SIMD=scalar|avx2|neon|auto (default auto = best the CPU
// supports). Selection happens once per process.

#include <cstddef>
#include <string_view>

namespace fpnni::simd {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  Backend backend;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  /// Product-rectangle weights over n intervals:
  ///   out[j] = scale * (pa[j] - pa[j+1]),   pa has n + 1 entries.
  void (*rect_weights)(const double* pa, double scale, double* out, std::size_t n);

  /// Product-trapezoid weights over n intervals [s_j, s_{j+1}] for the kernel
  /// (t - s)^(alpha - 1). d[j] = t - s_j (decreasing), pa[j] = d[j]^alpha,
  /// both with n + 1 entries. With I0 = (pa_j - pa_{j+1}) * inv_alpha and
  /// I1 = (d_j pa_j - d_{j+1} pa_{j+1}) * inv_alpha1:
  ///   wa[j] = scale * (I1 - d_{j+1} I0) / (d_j - d_{j+1})   (left node)
  ///   wb[j] = scale * (d_j I0 - I1) / (d_j - d_{j+1})       (right node)
  void (*trap_weights)(const double* d, const double* pa, double inv_alpha,
                       double inv_alpha1, double scale, double* wa, double* wb,
                       std::size_t n);
};

/// The process-wide table.
const KernelTable& kernels();

bool available(Backend b);

/// Table for a specific backend; throws InvalidArgument when unavailable.
const KernelTable& kernels_for(Backend b);

std::string_view to_string(Backend b);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(FPNNI_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(FPNNI_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace fpnni::simd
