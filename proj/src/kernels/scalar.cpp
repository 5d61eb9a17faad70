#include "absorbing/kernels.hpp"

namespace absorbing::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void gemv_scalar(const double* m, std::size_t rows, std::size_t cols,
                 const double* w, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(m + r * cols, w, cols);
}

void kron_scalar(const double* a, std::size_t na, const double* b,
                 std::size_t nb, double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const double ai = a[i];
    for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = ai * b[j];
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar, dot_scalar, gemv_scalar,
                                 kron_scalar};
  return table;
}

}  // namespace absorbing::kernels
