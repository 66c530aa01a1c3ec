#include "fpnni/simd/kernels.hpp"

namespace fpnni::simd::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void rect_weights_scalar(const double* pa, double scale, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = scale * (pa[j] - pa[j + 1]);
}

void trap_weights_scalar(const double* d, const double* pa, double inv_alpha,
                         double inv_alpha1, double scale, double* wa, double* wb,
                         std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double da = d[j];
    const double db = d[j + 1];
    const double i0 = (pa[j] - pa[j + 1]) * inv_alpha;
    const double i1 = (da * pa[j] - db * pa[j + 1]) * inv_alpha1;
    const double f = scale / (da - db);
    wa[j] = (i1 - db * i0) * f;
    wb[j] = (da * i0 - i1) * f;
  }
}

}  // namespace

const KernelTable kScalarTable{Backend::Scalar, dot_scalar, rect_weights_scalar,
                               trap_weights_scalar};

}  // namespace fpnni::simd::detail
