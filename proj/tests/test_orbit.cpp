#include <gtest/gtest.h>

#include <cmath>

#include "absorbing/errors.hpp"
#include "absorbing/orbit.hpp"
#include "test_util.hpp"

using namespace absorbing;
using absorbing::testing::load_instance;
using absorbing::testing::make_game;

namespace {

void expect_contract(const Game& g, const Orbit& o, std::span<const double> v, double eps) {
  ASSERT_GE(o.k0(), 1u);
  for (double x : o.w.back()) EXPECT_EQ(x, 1.0);
  double sum = 0.0;
  for (const auto& s : o.steps) sum += s.mu;
  EXPECT_GE(sum, 1.0 / o.delta);
  EXPECT_NEAR(sum, o.mu_sum, 1e-12);
  EXPECT_LE(orbit_residual(g, o, v, eps, 1e-6), 1e-12);
  double survive = 1.0;
  for (const auto& s : o.steps) survive *= 1.0 - s.mu;
  EXPECT_LE(survive, std::exp(-1.0 / o.delta) + 1e-15);
  for (const auto& w : o.w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_GE(w[i], v[i] - eps - 1e-6);
      EXPECT_LE(w[i], 1.0 + 1e-6);
    }
  }
}

}  // namespace

TEST(Orbit, HardExample) {
  const Game g = load_instance("ex1_hard");
  const auto st = build_structure(g);
  const auto grid = SearchGrid::build(g, st, 0.05);
  const auto v = minmax_all(g).values();
  OrbitOptions opt;
  opt.epsilon = 0.1;
  opt.delta = 0.4;
  const Orbit o = build_orbit(g, grid, v, opt);
  expect_contract(g, o, v, 0.1);
  // The last step leaves (1, 1) through the joint exit; the rest stay on W.
  EXPECT_EQ(o.steps.back().cls.tag, Case::WH);
  for (std::size_t k = 0; k + 1 < o.k0(); ++k) {
    EXPECT_EQ(o.steps[k].cls.tag, Case::W) << k;
    EXPECT_LE(o.steps[k].mu, 0.1 + 1e-12);
  }
  EXPECT_GE(o.k0(), 24u);
}

TEST(Orbit, FixedPointIsRepeated) {
  const Game g = make_game({1, 1}, {{{0, 0}, 1.0, {0.5, 0.5}}});
  const auto st = build_structure(g);
  const auto grid = SearchGrid::build(g, st, 0.05);
  EXPECT_EQ(grid.size(), 0u);
  const std::vector<double> v{0.5, 0.5};
  OrbitOptions opt;
  opt.delta = 0.4;
  const Orbit o = build_orbit(g, grid, v, opt);
  ASSERT_EQ(o.k0(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(o.w[k], (PayoffVector{0.5, 0.5}));
    EXPECT_EQ(o.steps[k].mu, 1.0);
  }
  EXPECT_EQ(o.fixed_point_repeats, 1u);
  expect_contract(g, o, v, 0.1);
}

TEST(Orbit, RejectsLargeDelta) {
  const Game g = load_instance("ex1_hard");
  const auto grid = SearchGrid::build(g, build_structure(g), 0.05);
  const std::vector<double> v{0.0, 0.6};
  OrbitOptions opt;
  opt.epsilon = 0.1;
  opt.delta = -1.0 / std::log(0.1);
  EXPECT_THROW(build_orbit(g, grid, v, opt), Error);
  opt.delta = 0.0;
  EXPECT_THROW(build_orbit(g, grid, v, opt), Error);
}

TEST(Orbit, BudgetExceeded) {
  const Game g = load_instance("ex1_hard");
  const auto grid = SearchGrid::build(g, build_structure(g), 0.05);
  const auto v = minmax_all(g).values();
  OrbitOptions opt;
  opt.k_max = 3;
  try {
    build_orbit(g, grid, v, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrbitBudgetExceeded);
  }
}
