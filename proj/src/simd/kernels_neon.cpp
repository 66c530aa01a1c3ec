// AArch64 only; Advanced SIMD is architecturally guaranteed there.

#include <arm_neon.h>

#include "fpnni/simd/kernels.hpp"

namespace fpnni::simd::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void rect_weights_neon(const double* pa, double scale, double* out, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    vst1q_f64(out + j, vmulq_f64(vs, vsubq_f64(vld1q_f64(pa + j), vld1q_f64(pa + j + 1))));
  }
  for (; j < n; ++j) out[j] = scale * (pa[j] - pa[j + 1]);
}

void trap_weights_neon(const double* d, const double* pa, double inv_alpha,
                       double inv_alpha1, double scale, double* wa, double* wb,
                       std::size_t n) {
  const float64x2_t va = vdupq_n_f64(inv_alpha);
  const float64x2_t va1 = vdupq_n_f64(inv_alpha1);
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t da = vld1q_f64(d + j);
    const float64x2_t db = vld1q_f64(d + j + 1);
    const float64x2_t pa0 = vld1q_f64(pa + j);
    const float64x2_t pa1 = vld1q_f64(pa + j + 1);
    const float64x2_t i0 = vmulq_f64(vsubq_f64(pa0, pa1), va);
    const float64x2_t i1 = vmulq_f64(vsubq_f64(vmulq_f64(da, pa0), vmulq_f64(db, pa1)), va1);
    const float64x2_t f = vdivq_f64(vs, vsubq_f64(da, db));
    vst1q_f64(wa + j, vmulq_f64(vfmsq_f64(i1, db, i0), f));
    vst1q_f64(wb + j, vmulq_f64(vsubq_f64(vmulq_f64(da, i0), i1), f));
  }
  for (; j < n; ++j) {
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

const KernelTable kNeonTable{Backend::Neon, dot_neon, rect_weights_neon, trap_weights_neon};

}  // namespace fpnni::simd::detail
