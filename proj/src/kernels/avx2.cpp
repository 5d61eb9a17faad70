#include "absorbing/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace absorbing::kernels {
namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

__attribute__((target("avx2,fma"))) double dot_avx2(const double* a,
                                                    const double* b,
                                                    std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4),
                           _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

__attribute__((target("avx2,fma"))) void gemv_avx2(const double* m,
                                                   std::size_t rows,
                                                   std::size_t cols,
                                                   const double* w,
                                                   double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(m + r * cols, w, cols);
}

__attribute__((target("avx2,fma"))) void kron_avx2(const double* a,
                                                   std::size_t na,
                                                   const double* b,
                                                   std::size_t nb,
                                                   double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const __m256d ai = _mm256_set1_pd(a[i]);
    double* row = out + i * nb;
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      _mm256_storeu_pd(row + j, _mm256_mul_pd(ai, _mm256_loadu_pd(b + j)));
    }
    for (; j < nb; ++j) row[j] = a[i] * b[j];
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::Avx2, dot_avx2, gemv_avx2, kron_avx2};
  return table;
}

}  // namespace absorbing::kernels

#endif
