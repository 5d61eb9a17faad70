#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "absorbing/dynamics.hpp"
#include "absorbing/errors.hpp"
#include "test_util.hpp"

using namespace absorbing;
using absorbing::testing::load_instance;
using absorbing::testing::make_game;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MixedProfile mix(std::vector<std::vector<double>> x) { return MixedProfile(std::move(x)); }

struct Fixture {
  Game g;
  AbsorptionStructure st;
  SearchGrid grid;
  std::vector<double> v;
};

Fixture fixture(const std::string& name, double mesh = 0.05) {
  Fixture f{load_instance(name), {}, {}, {}};
  f.st = build_structure(f.g);
  f.grid = SearchGrid::build(f.g, f.st, mesh);
  f.v = minmax_all(f.g).values();
  return f;
}

}  // namespace

TEST(Rho, ExampleOne) {
  const Game g = load_instance("example1");
  const Rho a = rho(g, mix({{1, 0, 0}, {1, 0, 0, 0}}));
  EXPECT_EQ(a.value[0], -kInf);
  EXPECT_FALSE(a.finite(0));
  EXPECT_NEAR(a.value[1], 0.25, 1e-15);
  EXPECT_EQ(a.action[1], 3);
  const Rho b = rho(g, mix({{0, 1, 0}, {1, 0, 0, 0}}));
  EXPECT_EQ(b.value[0], -kInf);
  EXPECT_NEAR(b.value[1], 0.6, 1e-15);
  EXPECT_THROW(rho(g, mix({{1, 0, 0}, {0, 0, 0, 1}})), Error);
}

TEST(Rho, SlackIgnoresMissingReplies) {
  Rho r{{-kInf, 0.4}, {-1, 2}};
  const std::vector<double> w{0.0, 0.5};
  EXPECT_NEAR(slack(w, r), 0.1, 1e-15);
  Rho none{{-kInf, -kInf}, {-1, -1}};
  EXPECT_EQ(slack(w, none), kInf);
}

TEST(Grid, ExampleOneLayout) {
  const auto f = fixture("example1");
  ASSERT_EQ(f.grid.blocks().size(), 2u);
  // Both maximal supports are a 3-simplex face times a vertex: 231 points each.
  EXPECT_EQ(f.grid.size(), 462u);
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    const MixedProfile x = f.grid.point(k);
    check_profile(f.g, x);
    EXPECT_EQ(absorb_prob_mixed(f.g, x), 0.0);
    EXPECT_EQ(f.grid.support(k), support_of(x));
    const Rho r = rho(f.g, x);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(r.value[i], f.grid.rho(k, i));
  }
}

TEST(Grid, NeighborsAreOneStepAway) {
  const auto f = fixture("example1", 0.25);
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    const MixedProfile x = f.grid.point(k);
    for (std::size_t nb : f.grid.neighbors(k)) {
      const MixedProfile y = f.grid.point(nb);
      double l1 = 0;
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t a = 0; a < x[i].size(); ++a) l1 += std::abs(x[i][a] - y[i][a]);
      EXPECT_NEAR(l1, 0.5, 1e-12);
    }
  }
}

TEST(Grid, CoarsensLargeBlocks) {
  const auto f = fixture("example1");
  const SearchGrid small = SearchGrid::build(f.g, f.st, 0.05, 50);
  for (const auto& b : small.blocks()) EXPECT_LE(b.count, 50u);
  EXPECT_THROW(SearchGrid::build(f.g, f.st, 0.0), Error);
}

TEST(ShortCircuit, ExampleOneCertificate) {
  const auto f = fixture("example1");
  const auto sc = lemma_multi_check(f.g, f.grid);
  ASSERT_TRUE(sc.has_value());
  EXPECT_EQ(sc->exit, (Exit{{0, 1}, {1, 2}}));
  EXPECT_NEAR(sc->payoff[0], 0.5, 1e-15);
  EXPECT_NEAR(sc->payoff[1], 0.5, 1e-15);
  EXPECT_EQ(sc->x.pure_profile(), (Profile{0, 0}));
}

TEST(ShortCircuit, HardExampleHasNone) {
  const auto f = fixture("ex1_hard");
  EXPECT_FALSE(lemma_multi_check(f.g, f.grid).has_value());
  const Rho r = rho(f.g, mix({{1, 0, 0}, {1, 0, 0, 0}}));
  EXPECT_NEAR(r.value[1], 0.95, 1e-15);
}

TEST(Classify, HardExampleCaseW) {
  const auto f = fixture("ex1_hard");
  const std::vector<double> w{0.9, 0.9};
  const Classification c = classify(f.g, f.grid, w, {});
  ASSERT_EQ(c.tag, Case::W);
  EXPECT_EQ(c.i0, 1);
  EXPECT_TRUE(c.refined);
  EXPECT_NEAR(c.x[0][0], 6.0 / 7.0, 1e-7);
  EXPECT_NEAR(c.x[0][1], 1.0 / 7.0, 1e-7);
  EXPECT_EQ(c.x[1][0], 1.0);
  EXPECT_FALSE(c.rho.finite(0));
  EXPECT_NEAR(c.rho.value[1], 0.9, 1e-8);

  const DynamicsStep s = step_f(f.g, c, 0.1, f.v, 1e-6);
  EXPECT_NEAR(s.q, 1.0, 1e-12);
  EXPECT_NEAR(s.mu, 0.1, 1e-12);
  EXPECT_NEAR(s.f[0], 0.9 - 0.1 * (0.9 - 10.0 / 21.0), 1e-7);
  EXPECT_NEAR(s.f[1], 0.9, 1e-7);
}

TEST(Classify, AllOnesIsCaseWH) {
  const auto f = fixture("example1");
  const std::vector<double> w{1.0, 1.0};
  const Classification c = classify(f.g, f.grid, w, {});
  ASSERT_EQ(c.tag, Case::WH);
  ASSERT_TRUE(c.exit.has_value());
  EXPECT_TRUE(c.exit->joint());
  EXPECT_GT(c.s_star, 0.0);
  const DynamicsStep s = step_f(f.g, c, 0.1, f.v, 1e-6);
  EXPECT_GT(s.alpha, 0.0);
  EXPECT_LE(s.alpha, 1.0);
}

TEST(Classify, LowTargetIsCaseWL) {
  const auto f = fixture("example1");
  // rho_2 >= 1/4 everywhere, so w_2 = 0.15 is below every finite rho_2.
  const std::vector<double> w{-0.1, 0.15};
  const Classification c = classify(f.g, f.grid, w, {});
  ASSERT_EQ(c.tag, Case::WL);
  EXPECT_LT(c.s_star, 0.0);
  EXPECT_GT(absorb_prob_mixed(f.g, c.x), 1e-6);
  EXPECT_LE(c.nash_regret, 1e-6);
}

TEST(StepF, CaseWHArithmetic) {
  const Game g = load_instance("example1");
  Classification c;
  c.tag = Case::WH;
  c.w = {1.0, 1.0};
  c.rho = Rho{{0.5, 0.2}, {0, 0}};
  c.exit = Exit{{0, 1}, {1, 1}};
  c.exit_payoff = {0.3, 0.6};
  const std::vector<double> v{0.0, 0.0};
  const DynamicsStep s = step_f(g, c, 0.1, v, 1e-6);
  EXPECT_NEAR(s.alpha, 5.0 / 7.0, 1e-15);
  EXPECT_EQ(s.alpha_player, 0);
  EXPECT_NEAR(s.mu, 5.0 / 7.0, 1e-15);
  EXPECT_NEAR(s.f[0], 0.5, 1e-15);
  EXPECT_NEAR(s.f[1], 5.0 / 7.0 * 0.6 + 2.0 / 7.0, 1e-15);
}

TEST(StepF, CaseWLPureAbsorbing) {
  const Game g = load_instance("example1");
  Classification c;
  c.tag = Case::WL;
  c.w = {0.2, 0.2};
  c.x = pure_profile(g, Profile{1, 2});
  const std::vector<double> v{0.0, 0.0};
  const DynamicsStep s = step_f(g, c, 0.1, v, 1e-6);
  EXPECT_EQ(s.mu, 1.0);
  EXPECT_NEAR(s.f[0], 0.5, 1e-15);
  EXPECT_NEAR(s.f[1], 0.5, 1e-15);
}

TEST(StepF, RejectsExitsLeavingY) {
  const Game g = load_instance("example1");
  Classification c;
  c.tag = Case::WL;
  c.w = {0.2, 0.2};
  c.x = pure_profile(g, Profile{1, 1});  // r = (1/4, 1/3)
  const std::vector<double> v{0.5, 0.5};
  try {
    step_f(g, c, 0.1, v, 1e-6);
    FAIL() << "expected InvalidWitness";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidWitness);
  }
}

namespace {

void fuzz_instance(const std::string& name, int samples) {
  const auto f = fixture(name);
  const double eps = 0.1;
  std::mt19937_64 rng(21);
  int counts[3] = {0, 0, 0};
  for (int k = 0; k < samples; ++k) {
    std::vector<double> w(f.v.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::uniform_real_distribution<double> u(f.v[i] - eps, 1.0);
      w[i] = u(rng);
    }
    const Classification c = classify(f.g, f.grid, w, {});
    ++counts[static_cast<int>(c.tag)];
    const DynamicsStep s = step_f(f.g, c, eps, f.v, 1e-6);
    ASSERT_GT(s.mu, 0.0);
    ASSERT_LE(s.mu, 1.0 + 1e-12);
    for (std::size_t i = 0; i < w.size(); ++i) {
      ASSERT_GE(s.f[i], f.v[i] - eps - 1e-6);
      ASSERT_LE(s.f[i], 1.0 + 1e-6);
    }
    if (c.tag == Case::W) {
      // f(w) - w = eps q (r(a_i0, x_-i0) - w).
      MixedProfile y = c.x;
      const auto i0 = static_cast<std::size_t>(c.i0);
      y[i0].assign(f.g.num_actions(i0), 0.0);
      y[i0][static_cast<std::size_t>(c.rho.action[i0])] = 1.0;
      const PayoffVector r = absorb_payoff_mixed(f.g, y);
      for (std::size_t i = 0; i < w.size(); ++i)
        ASSERT_NEAR(s.f[i] - w[i], s.mu * (r[i] - w[i]), 1e-12);
      ASSERT_LE(std::abs(w[i0] - c.rho.value[i0]), c.refined ? 1e-8 : 1e-6);
    }
    if (c.tag == Case::WH) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (!c.rho.finite(i)) continue;
        const double mixed = (1 - s.alpha) * w[i] + s.alpha * c.exit_payoff[i];
        ASSERT_GE(mixed, c.rho.value[i] - 1e-12);
        if (static_cast<int>(i) == s.alpha_player) ASSERT_NEAR(mixed, c.rho.value[i], 1e-12);
      }
    }
  }
  EXPECT_EQ(counts[0] + counts[1] + counts[2], samples);
}

}  // namespace

TEST(DynamicsProperty, FuzzExampleOne) { fuzz_instance("example1", 10000); }
TEST(DynamicsProperty, FuzzHardExample) { fuzz_instance("ex1_hard", 10000); }

TEST(DynamicsProperty, MeshHalvingNeverSwapsWHAndWL) {
  for (const std::string name : {"example1", "ex1_hard"}) {
    const auto coarse = fixture(name, 0.1);
    const SearchGrid fine = SearchGrid::build(coarse.g, coarse.st, 0.05);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 2000; ++k) {
      std::vector<double> w(2);
      for (std::size_t i = 0; i < 2; ++i) {
        std::uniform_real_distribution<double> u(coarse.v[i] - 0.1, 1.0);
        w[i] = u(rng);
      }
      const Case a = classify(coarse.g, coarse.grid, w, {}).tag;
      const Case b = classify(coarse.g, fine, w, {}).tag;
      if (a != Case::W && b != Case::W) ASSERT_EQ(a, b) << name << " w=" << w[0] << "," << w[1];
    }
  }
}

TEST(Classify, HardExampleAllOnesUsesExitWithMargin) {
  const auto f = fixture("ex1_hard");
  const std::vector<double> w{1.0, 1.0};
  const Classification c = classify(f.g, f.grid, w, {});
  ASSERT_EQ(c.tag, Case::WH);
  EXPECT_TRUE(c.margin);
  EXPECT_EQ(c.i0, 1);
  const DynamicsStep s = step_f(f.g, c, 0.1, f.v, 1e-6);
  EXPECT_EQ(c.x.pure_profile(), (Profile{0, 0}));
  EXPECT_EQ(*c.exit, (Exit{{0, 1}, {2, 1}}));
  EXPECT_NEAR(s.alpha, 0.2, 1e-12);
  EXPECT_EQ(s.alpha_player, 1);
  EXPECT_NEAR(s.f[0], 0.84, 1e-12);
  EXPECT_NEAR(s.f[1], 0.95, 1e-12);
}
