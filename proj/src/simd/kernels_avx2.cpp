// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "fpnni/simd/kernels.hpp"

namespace fpnni::simd::detail {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void rect_weights_avx2(const double* pa, double scale, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(pa + j), _mm256_loadu_pd(pa + j + 1));
    _mm256_storeu_pd(out + j, _mm256_mul_pd(vs, diff));
  }
  for (; j < n; ++j) out[j] = scale * (pa[j] - pa[j + 1]);
}

void trap_weights_avx2(const double* d, const double* pa, double inv_alpha,
                       double inv_alpha1, double scale, double* wa, double* wb,
                       std::size_t n) {
  const __m256d va = _mm256_set1_pd(inv_alpha);
  const __m256d va1 = _mm256_set1_pd(inv_alpha1);
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d da = _mm256_loadu_pd(d + j);
    const __m256d db = _mm256_loadu_pd(d + j + 1);
    const __m256d pa0 = _mm256_loadu_pd(pa + j);
    const __m256d pa1 = _mm256_loadu_pd(pa + j + 1);
    const __m256d i0 = _mm256_mul_pd(_mm256_sub_pd(pa0, pa1), va);
    const __m256d i1 = _mm256_mul_pd(_mm256_fmsub_pd(da, pa0, _mm256_mul_pd(db, pa1)), va1);
    const __m256d f = _mm256_div_pd(vs, _mm256_sub_pd(da, db));
    _mm256_storeu_pd(wa + j, _mm256_mul_pd(_mm256_fnmadd_pd(db, i0, i1), f));
    _mm256_storeu_pd(wb + j, _mm256_mul_pd(_mm256_fmsub_pd(da, i0, i1), f));
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

const KernelTable kAvx2Table{Backend::Avx2, dot_avx2, rect_weights_avx2, trap_weights_avx2};

}  // namespace fpnni::simd::detail
