#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "absorbing/kernels.hpp"

using namespace absorbing::kernels;

namespace {

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(Kernels, ScalarDotMatchesNaiveSum) {
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(scalar_table().dot(a.data(), b.data(), 3), 32.0);
}

TEST(Kernels, VectorVariantsMatchScalar) {
  std::mt19937_64 rng(7);
  const auto& ref = scalar_table();
  for (Isa isa : vector_isas()) {
    const auto& t = table_for(isa);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u, 257u}) {
      auto a = random_vec(rng, n);
      auto b = random_vec(rng, n);
      const double d0 = ref.dot(a.data(), b.data(), n);
      const double d1 = t.dot(a.data(), b.data(), n);
      EXPECT_NEAR(d0, d1, 1e-13 * (1.0 + static_cast<double>(n))) << isa_name(isa) << " n=" << n;

      const std::size_t rows = 1 + n % 5;
      auto m = random_vec(rng, rows * n);
      std::vector<double> o0(rows), o1(rows);
      ref.gemv(m.data(), rows, n, a.data(), o0.data());
      t.gemv(m.data(), rows, n, a.data(), o1.data());
      for (std::size_t r = 0; r < rows; ++r) EXPECT_NEAR(o0[r], o1[r], 1e-13 * (1.0 + n));

      const std::size_t nb = 1 + n % 11;
      auto c = random_vec(rng, nb);
      std::vector<double> k0(n * nb), k1(n * nb);
      ref.kron(a.data(), n, c.data(), nb, k0.data());
      t.kron(a.data(), n, c.data(), nb, k1.data());
      EXPECT_EQ(k0, k1);
    }
  }
}

TEST(Kernels, ForceAndResetIsa) {
  force_isa(Isa::Scalar);
  EXPECT_EQ(active().isa, Isa::Scalar);
  reset_isa();
  EXPECT_TRUE(isa_available(active().isa));
}

TEST(Kernels, UnavailableIsaThrows) {
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_available(isa)) EXPECT_ANY_THROW(table_for(isa));
  }
}
