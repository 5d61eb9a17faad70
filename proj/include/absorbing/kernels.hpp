#pragma once

// Dense contraction kernels behind every multilinear evaluation of the game
// tables. A scalar reference implementation is always present; vector
// variants are compiled per ISA and chosen once at startup.

#include <cstddef>
#include <span>
#include <string_view>

namespace absorbing::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[r] = sum_c m[r * cols + c] * w[c]
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols,
               const double* w, double* out);
  // out[i * nb + j] = a[i] * b[j]
  void (*kron)(const double* a, std::size_t na, const double* b,
               std::size_t nb, double* out);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

bool isa_available(Isa isa);

// Throws absorbing::Error(InvalidArgument) when the ISA is not usable here.
const KernelTable& table_for(Isa isa);

// Best table for the running CPU unless overridden with force_isa() or the
// ABSORBING_ISA environment variable ("scalar", "avx2", "neon").
const KernelTable& active();
void force_isa(Isa isa);
void reset_isa();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void gemv(std::span<const double> m, std::size_t rows,
                 std::span<const double> w, std::span<double> out) {
  active().gemv(m.data(), rows, w.size(), w.data(), out.data());
}

inline void kron(std::span<const double> a, std::span<const double> b,
                 std::span<double> out) {
  active().kron(a.data(), a.size(), b.data(), b.size(), out.data());
}

}  // namespace absorbing::kernels
