#include "absorbing/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace absorbing::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void gemv_neon(const double* m, std::size_t rows, std::size_t cols,
               const double* w, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_neon(m + r * cols, w, cols);
}

void kron_neon(const double* a, std::size_t na, const double* b,
               std::size_t nb, double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const float64x2_t ai = vdupq_n_f64(a[i]);
    double* row = out + i * nb;
    std::size_t j = 0;
    for (; j + 2 <= nb; j += 2) vst1q_f64(row + j, vmulq_f64(ai, vld1q_f64(b + j)));
    for (; j < nb; ++j) row[j] = a[i] * b[j];
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{Isa::Neon, dot_neon, gemv_neon, kron_neon};
  return table;
}

}  // namespace absorbing::kernels

#endif
