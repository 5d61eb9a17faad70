#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "absorbing/lp.hpp"
#include "absorbing/minmax.hpp"
#include "test_util.hpp"

using namespace absorbing;
using absorbing::testing::load_instance;
using absorbing::testing::make_game;

using absorbing::testing::random_game;
using absorbing::testing::random_profile;

TEST(Lp, MatchingPennies) {
  const auto s = solve_matrix_game({1, 0, 0, 1}, 2, 2);
  EXPECT_NEAR(s.value, 0.5, 1e-12);
  EXPECT_NEAR(s.col[0], 0.5, 1e-12);
  EXPECT_NEAR(s.row[0], 0.5, 1e-12);
}

TEST(Lp, DominatedColumn) {
  // Column 1 is better for the minimizer everywhere.
  const auto s = solve_matrix_game({3, 1, 4, 2, 5, 0}, 3, 2);
  EXPECT_NEAR(s.value, 2.0, 1e-12);
  EXPECT_NEAR(s.col[1], 1.0, 1e-12);
}

TEST(Lp, RandomGamesSatisfyDuality) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + trial % 5, cols = 1 + (trial / 5) % 5;
    std::vector<double> m(rows * cols);
    for (double& v : m) v = u(rng);
    const auto s = solve_matrix_game(m, rows, cols);
    // Row mixture guarantees at least the value against every column.
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0;
      for (std::size_t r = 0; r < rows; ++r) v += s.row[r] * m[r * cols + c];
      EXPECT_GE(v, s.value - 1e-10);
    }
  }
}

TEST(BestReply, ExampleOneValues) {
  const Game g = load_instance("example1");
  EXPECT_EQ(best_reply_value(g, 0, pure_profile(g, Profile{0, 0})), 0.0);
  EXPECT_EQ(best_reply(g, 0, pure_profile(g, Profile{0, 0})).action, -1);
  const auto br = best_reply(g, 1, pure_profile(g, Profile{0, 0}));
  EXPECT_EQ(br.action, 3);
  EXPECT_NEAR(br.rho, 0.25, 1e-15);
  const MixedProfile x({{0.5, 0.5, 0}, {1, 0, 0, 0}});
  const auto per = contract_unilateral(g, 1, x);
  EXPECT_NEAR(per[3].pr[1] / per[3].p, 17.0 / 40.0, 1e-15);
  // Column a2'' absorbs only against a1' and pays 1/2 there.
  EXPECT_NEAR(best_reply_value(g, 1, x), 0.5, 1e-15);
}

TEST(Minmax, ExampleOneValues) {
  const Game g = load_instance("example1");
  const auto res = minmax_all(g);
  EXPECT_NEAR(res.players[0].value, 0.0, 1e-6);
  EXPECT_NEAR(res.players[1].value, 0.25, 1e-6);
  EXPECT_TRUE(res.players[0].certified);
  EXPECT_TRUE(res.players[1].certified);
  EXPECT_NEAR(res.punish(0)[1][0], 1.0, 1e-9);
  EXPECT_NEAR(res.punish(1)[0][0], 1.0, 1e-6);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LE(res.players[i].residual, 1e-6);
    EXPECT_LE(best_reply_value(g, i, res.punish(i)), res.players[i].value + 1e-6);
  }
}

TEST(Minmax, ConstantPayoffGame) {
  std::vector<RawEntry> entries;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 3; ++b) entries.push_back({{a, b}, 0.5, {0.3, 0.7}});
  }
  const Game g = make_game({2, 3}, entries);
  EXPECT_NEAR(minmax(g, 0).value, 0.3, 1e-6);
  EXPECT_NEAR(minmax(g, 1).value, 0.7, 1e-6);
}

TEST(Minmax, DiscountedCrossCheckExampleOne) {
  const Game g = load_instance("example1");
  const auto res = minmax_all(g);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto c = discounted_cross_check(g, i);
    ASSERT_TRUE(c.has_value());
    EXPECT_NEAR(c->values.back(), res.players[i].value, 1e-3);
    EXPECT_NEAR(c->extrapolated, res.players[i].value, 1e-3);
  }
}

TEST(MinmaxProperty, InfimumAgainstRandomProfiles) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Game g = random_game(rng, {3, 3}, 0.6);
    const auto res = minmax_all(g);
    for (std::size_t i = 0; i < 2; ++i) {
      for (int k = 0; k < 1000; ++k) {
        EXPECT_GE(best_reply_value(g, i, random_profile(g, rng)), res.players[i].value - 1e-6);
      }
    }
  }
}

TEST(MinmaxProperty, TwoPlayerBracketIsTight) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const Game g = random_game(rng, {std::size_t(2 + trial % 3), std::size_t(2 + trial % 4)}, 0.7);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto e = minmax(g, i);
      EXPECT_LE(e.value - e.lower, 1e-6);
      EXPECT_GE(e.value, 0.0);
      EXPECT_LE(e.value, 1.0);
    }
  }
}

TEST(MinmaxProperty, TwoPlayerMatchesDiscountedLimit) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const Game g = random_game(rng, {3, 3}, 0.6);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto c = discounted_cross_check(g, i);
      EXPECT_NEAR(c->values.back(), minmax(g, i).value, 2e-3);
    }
  }
}

TEST(MinmaxProperty, ThreePlayerUpperBoundBeatsGrid) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 5; ++trial) {
    const Game g = random_game(rng, {2, 2, 2}, 0.6);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto e = minmax(g, i);
      EXPECT_FALSE(e.value < 0.0);
      EXPECT_LE(best_reply_value(g, i, e.punish), e.value + 1e-12);
      // Coarse grid over the two opponents' mixtures.
      double grid_min = 1.0;
      for (int s = 0; s <= 40; ++s) {
        for (int t = 0; t <= 40; ++t) {
          std::vector<std::vector<double>> x(3, {0.5, 0.5});
          std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
          x[j] = {s / 40.0, 1 - s / 40.0};
          x[k] = {t / 40.0, 1 - t / 40.0};
          grid_min = std::min(grid_min, best_reply_value(g, i, MixedProfile(x)));
        }
      }
      EXPECT_LE(e.value, grid_min + 1e-9);
    }
  }
}
