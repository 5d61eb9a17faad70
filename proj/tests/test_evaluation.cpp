#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "absorbing/config.hpp"
#include "absorbing/errors.hpp"
#include "absorbing/evaluation.hpp"
#include "absorbing/game_io.hpp"
#include "absorbing/generate.hpp"
#include "absorbing/pipeline.hpp"
#include "test_util.hpp"

using namespace absorbing;
using absorbing::testing::load_instance;
using absorbing::testing::make_game;

namespace {

// (0,0) absorbs surely at (0.3, 0.7); (1,0) absorbs half the time at (0.2, 0.4).
Game toy() {
  return make_game({2, 2}, {{{0, 0}, 1.0, {0.3, 0.7}}, {{1, 0}, 0.5, {0.2, 0.4}}});
}

BlockSpec pure_block(const Game& g, Profile a, std::uint64_t T) {
  BlockSpec b;
  b.kind = BlockKind::Case1;
  b.y = pure_profile(g, a);
  b.T = T;
  b.p = absorb_prob_mixed(g, b.y);
  b.mass = block_mass(static_cast<double>(T), b.p);
  b.target = b.mass;
  if (b.p > 0) b.payoff = absorb_payoff_mixed(g, b.y);
  return b;
}

StrategySpec toy_spec(const Game& g, std::vector<BlockSpec> blocks) {
  StrategySpec s;
  std::uint64_t n = 0;
  for (auto& b : blocks) {
    s.start.push_back(n);
    n += b.T;
  }
  s.blocks = std::move(blocks);
  s.tail = pure_profile(g, Profile{1, 1});
  s.punish = {pure_profile(g, Profile{0, 1}), pure_profile(g, Profile{1, 1})};
  s.punish_value = {0.0, 0.0};
  s.target = {0.0, 0.0};
  return s;
}

const Solution& hard() {
  static const Solution s = [] {
    RunConfig cfg;
    cfg.epsilon = 0.1;
    cfg.delta = 0.4;
    return solve(load_instance("ex1_hard"), cfg);
  }();
  return s;
}

}  // namespace

TEST(ExactEval, SingleSureBlock) {
  const Game g = toy();
  const auto spec = toy_spec(g, {pure_block(g, {0, 0}, 1)});
  const auto r = exact_eval(g, spec);
  EXPECT_DOUBLE_EQ(r.gamma[0], 0.3);
  EXPECT_DOUBLE_EQ(r.gamma[1], 0.7);
  EXPECT_DOUBLE_EQ(r.total_absorption, 1.0);
}

TEST(ExactEval, TwoBlocksMix) {
  const Game g = toy();
  const auto spec = toy_spec(g, {pure_block(g, {1, 0}, 1), pure_block(g, {0, 0}, 1)});
  const auto r = exact_eval(g, spec);
  EXPECT_NEAR(r.gamma[0], 0.5 * 0.2 + 0.5 * 0.3, 1e-15);
  EXPECT_NEAR(r.gamma[1], 0.5 * 0.4 + 0.5 * 0.7, 1e-15);
  ASSERT_EQ(r.Z.size(), 3u);
  EXPECT_NEAR(r.Z[1][0], 0.3, 1e-15);
}

TEST(ExactEval, RepeatedHalfBlock) {
  const Game g = toy();
  const auto spec = toy_spec(g, {pure_block(g, {1, 0}, 3)});
  const auto r = exact_eval(g, spec);
  EXPECT_NEAR(r.total_absorption, 0.875, 1e-15);
  EXPECT_NEAR(r.gamma[1], 0.875 * 0.4 + 0.125 * r.Z.back()[1], 1e-15);
}

TEST(Simulate, DeterministicSpecHasNoVariance) {
  const Game g = toy();
  const auto spec = toy_spec(g, {pure_block(g, {0, 0}, 5)});
  const auto s = simulate(g, spec, 1000, 7);
  EXPECT_DOUBLE_EQ(s.mean[0], 0.3);
  EXPECT_DOUBLE_EQ(s.se[0], 0.0);
  EXPECT_DOUBLE_EQ(s.absorbed_fraction, 1.0);
  EXPECT_DOUBLE_EQ(s.mean_stages, 1.0);
}

TEST(Simulate, ZeroEpisodesThrows) {
  const Game g = toy();
  const auto spec = toy_spec(g, {pure_block(g, {0, 0}, 1)});
  EXPECT_THROW(simulate(g, spec, 0, 1), Error);
}

TEST(Simulate, AgreesWithExactOnHardExample) {
  const Game g = load_instance("ex1_hard");
  const auto& s = hard();
  const auto sim = simulate(g, s.spec, 20000, 11);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LE(std::abs(sim.mean[i] - s.eval.gamma[i]), 3.0 * sim.se[i] + 1e-12);
  }
  EXPECT_EQ(sim.detection_fraction, 0.0);
}

TEST(Simulate, SeedDeterminesResult) {
  const Game g = load_instance("ex1_hard");
  const auto& s = hard();
  const auto a = simulate(g, s.spec, 2000, 5);
  const auto b = simulate(g, s.spec, 2000, 5);
  const auto c = simulate(g, s.spec, 2000, 6);
  EXPECT_EQ(sim_to_json(a).dump(), sim_to_json(b).dump());
  EXPECT_NE(sim_to_json(a).dump(), sim_to_json(c).dump());
}

TEST(Simulate, WorkerCountDoesNotChangeResult) {
  const Game g = load_instance("ex1_hard");
  const auto& s = hard();
  set_worker_count(1);
  const auto a = simulate(g, s.spec, 5000, 9);
  set_worker_count(3);
  const auto b = simulate(g, s.spec, 5000, 9);
  set_worker_count(0);
  EXPECT_EQ(sim_to_json(a).dump(), sim_to_json(b).dump());
}

TEST(Ledger, HardExampleWithinEta) {
  const auto& s = hard();
  const auto& r = s.eval;
  ASSERT_EQ(r.ledger.size(), s.spec.blocks.size());
  for (std::size_t k = 0; k < r.ledger.size(); ++k) EXPECT_LE(r.ledger[k], r.eta[k]);
  EXPECT_GT(r.total_absorption, 1.0 - 0.1);
  EXPECT_LE(r.distance_to_target, 0.4);
  EXPECT_LE(r.detection_bound, 0.1 + 1e-12);
}

TEST(PlanValue, MatchesBruteForceOnRandomPlans) {
  const Game g = load_instance("ex1_hard");
  const auto& spec = hard().spec;
  std::mt19937_64 rng(17);
  for (std::size_t i = 0; i < 2; ++i) {
    std::uniform_int_distribution<int> act(-1, static_cast<int>(g.num_actions(i)) - 1);
    for (int trial = 0; trial < 25; ++trial) {
      PurePlan plan;
      // Mostly compliant with a few deviating blocks.
      for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
        plan.block_action.push_back(trial % 5 == 0 || rng() % 4 == 0 ? act(rng) : -1);
      }
      plan.tail_action = act(rng);
      EXPECT_NEAR(plan_value(g, spec, i, plan), plan_value_bruteforce(g, spec, i, plan), 1e-10);
    }
  }
}

TEST(PlanValue, CompliantPlanMatchesExact) {
  const Game g = load_instance("ex1_hard");
  const auto& s = hard();
  PurePlan plan;
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(plan_value(g, s.spec, i, plan), s.eval.gamma[i], 1e-12);
  }
}

TEST(Deviations, CertificateAdmitsNoGain) {
  const Game g = load_instance("example1");
  RunConfig cfg;
  const Solution s = solve(g, cfg);
  DeviationOptions opt;
  opt.episodes = 5000;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto rep = deviation_suite(g, s.spec, i, opt);
    EXPECT_LE(rep.max_gain, 1e-9);
    EXPECT_FALSE(rep.entries.empty());
  }
}

TEST(Deviations, HardExampleGainsBelowEpsilon) {
  const Game g = load_instance("ex1_hard");
  const auto& s = hard();
  DeviationOptions opt;
  opt.episodes = 3000;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto rep = deviation_suite(g, s.spec, i, opt);
    EXPECT_LE(rep.max_gain_less_3se, 0.1);
    for (const auto& e : rep.entries) {
      if (e.family == "d3") EXPECT_LE(e.gain, 1e-9) << e.label;
      if (e.exact) EXPECT_EQ(e.se, 0.0);
    }
    EXPECT_NO_THROW((void)deviation_to_json(rep).dump());
  }
}

TEST(Generate, DeterministicAndValid) {
  const Game a = generate_instance({2, 3}, 42);
  const Game b = generate_instance({2, 3}, 42);
  const Game c = generate_instance({2, 3}, 43);
  EXPECT_EQ(game_to_json(a).dump(), game_to_json(b).dump());
  EXPECT_NE(content_hash(a), content_hash(c));
  EXPECT_EQ(game_to_json(game_from_json(game_to_json(a))).dump(), game_to_json(a).dump());
}

TEST(Generate, RespectsConstraints) {
  RunConfig cfg;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const std::vector<std::size_t> sizes = seed % 3 == 0 ? std::vector<std::size_t>{2, 2, 2}
                                                         : std::vector<std::size_t>{2 + seed % 2, 3};
    const Game g = generate_instance(sizes, seed);
    const auto a = analyze(g, cfg);
    EXPECT_TRUE(a.precondition.pass) << seed;
    EXPECT_FALSE(a.nonabsorbing_equilibrium.has_value()) << seed;
  }
}

TEST(Generate, RejectsBadSizes) {
  EXPECT_THROW(generate_instance({2}, 1), Error);
  EXPECT_THROW(generate_instance({2, 0}, 1), Error);
}

TEST(Pipeline, RectangularInstanceIsRejected) {
  const Game g = load_instance("example2");
  RunConfig cfg;
  const auto a = analyze(g, cfg);
  EXPECT_FALSE(a.precondition.pass);
  try {
    (void)solve(g, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RectangularComponentFound);
  }
}

TEST(Pipeline, NonabsorbingEquilibriumShortcut) {
  // Only a joint move absorbs, so (1,1) is stable.
  const Game g = make_game({2, 2}, {{{0, 0}, 1.0, {0.5, 0.5}}});
  RunConfig cfg;
  const Solution s = solve(g, cfg);
  EXPECT_EQ(s.kind, SolutionKind::NonabsorbingEquilibrium);
  EXPECT_TRUE(s.spec.blocks.empty());
  EXPECT_EQ(absorb_prob_mixed(g, s.spec.tail), 0.0);
}

TEST(Pipeline, SolutionJsonIsStable) {
  const Game g = load_instance("ex1_hard");
  RunConfig cfg;
  cfg.delta = 0.4;
  const json a = envelope("solution", g, cfg, solution_to_json(g, solve(g, cfg)));
  const json b = envelope("solution", g, cfg, solution_to_json(g, solve(g, cfg)));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["instance_hash"], content_hash(g));
}
