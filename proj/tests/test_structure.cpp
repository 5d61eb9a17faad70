#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "absorbing/errors.hpp"
#include "absorbing/structure.hpp"
#include "test_util.hpp"

using namespace absorbing;
using absorbing::testing::load_instance;
using absorbing::testing::make_game;

namespace {

// Game whose absorbing profiles are exactly the set bits of mask.
Game pattern_game(const std::vector<std::size_t>& sizes, std::uint64_t mask) {
  std::size_t total = 1;
  for (auto s : sizes) total *= s;
  std::vector<RawEntry> entries;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!(mask >> idx & 1u)) continue;
    RawEntry e;
    e.profile.assign(sizes.size(), 0);
    std::size_t rem = idx;
    for (std::size_t i = sizes.size(); i-- > 0;) {
      e.profile[i] = static_cast<int>(rem % sizes[i]);
      rem /= sizes[i];
    }
    e.p = 1.0;
    e.r.assign(sizes.size(), 0.5);
    entries.push_back(e);
  }
  return make_game(sizes, entries);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

// Union-find over the explicit edge list of single-player moves inside B.
std::vector<std::set<std::size_t>> brute_components(const Game& g) {
  const std::size_t total = g.num_profiles();
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = a + 1; b < total; ++b) {
      if (g.absorbing(a) || g.absorbing(b)) continue;
      const Profile pa = g.profile(a), pb = g.profile(b);
      int diff = 0;
      for (std::size_t i = 0; i < pa.size(); ++i) diff += pa[i] != pb[i];
      if (diff == 1) parent[find_root(parent, a)] = find_root(parent, b);
    }
  }
  std::map<std::size_t, std::set<std::size_t>> groups;
  for (std::size_t a = 0; a < total; ++a) {
    if (!g.absorbing(a)) groups[find_root(parent, a)].insert(a);
  }
  std::vector<std::set<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  std::sort(out.begin(), out.end());
  return out;
}

void expect_exit_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "expected " << error_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code);
  }
}

}  // namespace

TEST(Structure, ExampleOneSingleNonRectangularComponent) {
  const Game g = load_instance("example1");
  const auto st = build_structure(g);
  ASSERT_EQ(st.components.size(), 1u);
  const auto& c = st.components[0];
  std::vector<std::size_t> expected;
  for (Profile a : {Profile{0, 0}, Profile{0, 1}, Profile{0, 2}, Profile{1, 0}, Profile{2, 0}}) {
    expected.push_back(g.index(a));
  }
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(c.members, expected);
  EXPECT_FALSE(c.rectangular);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_EQ(st.component_of[g.index(*c.witness)], -1);
  EXPECT_TRUE(check_precondition(st).pass);
}

TEST(Structure, ExampleTwoComponents) {
  const Game g = load_instance("example2");
  const auto st = build_structure(g);
  ASSERT_EQ(st.components.size(), 3u);
  std::multiset<std::pair<std::size_t, bool>> got;
  for (const auto& c : st.components) got.insert({c.members.size(), c.rectangular});
  std::multiset<std::pair<std::size_t, bool>> want{{1, true}, {6, true}, {6, false}};
  EXPECT_EQ(got, want);
  const auto singleton = std::find_if(st.components.begin(), st.components.end(),
                                      [](const Component& c) { return c.members.size() == 1; });
  EXPECT_EQ(g.profile(singleton->members[0]), (Profile{1, 1, 2}));
  for (const auto& c : st.components) {
    if (c.members.size() == 6 && c.rectangular) {
      EXPECT_EQ(c.projections, (std::vector<std::vector<int>>{{3}, {2, 3}, {0, 1, 2}}));
    }
  }
  const auto pre = check_precondition(st);
  EXPECT_FALSE(pre.pass);
  ASSERT_TRUE(pre.rectangular_component.has_value());
  EXPECT_TRUE(st.components[*pre.rectangular_component].rectangular);
}

TEST(Structure, AllAbsorbingHasNoComponents) {
  const Game g = pattern_game({2, 2}, 0xF);
  const auto st = build_structure(g);
  EXPECT_TRUE(st.components.empty());
  EXPECT_TRUE(check_precondition(st).pass);
  EXPECT_FALSE(find_nonabsorbing_equilibrium(g, st).has_value());
}

TEST(Structure, ExampleOneExitsAtCorner) {
  const Game g = load_instance("example1");
  const auto exits = exits_at_support(g, {{0}, {0}});
  std::vector<Exit> expected{{{1}, {3}},
                             {{0, 1}, {1, 1}},
                             {{0, 1}, {1, 2}},
                             {{0, 1}, {2, 1}},
                             {{0, 1}, {2, 2}}};
  EXPECT_EQ(exits, expected);
}

TEST(Structure, ExampleOneNoJointExitOffCorner) {
  const Game g = load_instance("example1");
  EXPECT_FALSE(has_joint_exit(g, {{1}, {0}}));
  EXPECT_FALSE(has_joint_exit(g, {{0}, {1}}));
}

TEST(Structure, ExitsRequireNonabsorbingSupport) {
  const Game g = load_instance("example1");
  expect_exit_code(ErrorCode::SupportNotNonabsorbing,
                   [&] { exits_at_support(g, {{0}, {0, 3}}); });
}

TEST(Structure, RectangularityViaExitsOnExamples) {
  const Game g1 = load_instance("example1");
  const auto st1 = build_structure(g1);
  EXPECT_FALSE(rectangularity_via_exits(g1, st1, 0));
  const Game g2 = load_instance("example2");
  const auto st2 = build_structure(g2);
  for (std::size_t l = 0; l < st2.components.size(); ++l) {
    EXPECT_EQ(rectangularity_via_exits(g2, st2, l), st2.components[l].rectangular);
  }
}

TEST(Structure, MaximalSupportsOfExampleOne) {
  const Game g = load_instance("example1");
  const auto st = build_structure(g);
  const auto max = maximal_supports(g, st, 0);
  EXPECT_EQ(max, (std::vector<Support>{{{0}, {0, 1, 2}}, {{0, 1, 2}, {0}}}));
  EXPECT_EQ(product_supports(g, st, 0).size(), 7u + 7u - 1u);
}

TEST(Structure, NoNonabsorbingEquilibriumInExampleOne) {
  const Game g = load_instance("example1");
  EXPECT_FALSE(find_nonabsorbing_equilibrium(g, build_structure(g)).has_value());
}

TEST(Structure, NonabsorbingEquilibriumFound) {
  // Row 0 and column 0 nonabsorbing; every deviation from (0,0) stays in B.
  const Game g = make_game({2, 2}, {{{1, 1}, 1.0, {0.5, 0.5}}});
  const auto x = find_nonabsorbing_equilibrium(g, build_structure(g));
  ASSERT_TRUE(x.has_value());
  EXPECT_TRUE(x->is_pure());
  EXPECT_EQ(x->pure_profile(), (Profile{0, 0}));
}

TEST(StructureProperty, PartitionMatchesUnionFind) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<std::size_t> sizes{std::size_t(2 + trial % 2), 3, std::size_t(1 + trial % 3)};
    std::size_t total = sizes[0] * sizes[1] * sizes[2];
    const Game g = pattern_game(sizes, rng() & ((std::uint64_t{1} << total) - 1));
    const auto st = build_structure(g);
    std::vector<std::set<std::size_t>> got;
    for (const auto& c : st.components) got.emplace_back(c.members.begin(), c.members.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, brute_components(g));
  }
}

TEST(StructureProperty, RectangularityEquivalenceExhaustiveTwoPlayer) {
  for (const auto& sizes : {std::vector<std::size_t>{2, 2}, std::vector<std::size_t>{2, 3},
                            std::vector<std::size_t>{3, 3}}) {
    const std::size_t total = sizes[0] * sizes[1];
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total); ++mask) {
      const Game g = pattern_game(sizes, mask);
      const auto st = build_structure(g);
      for (std::size_t l = 0; l < st.components.size(); ++l) {
        ASSERT_EQ(st.components[l].rectangular, rectangularity_via_exits(g, st, l))
            << "mask " << mask;
      }
    }
  }
}

TEST(StructureProperty, RectangularityEquivalenceThreePlayer) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    const std::vector<std::size_t> sizes{std::size_t(2 + trial % 2), std::size_t(2 + (trial / 2) % 2), std::size_t(2 + (trial / 4) % 2)};
    const std::size_t total = sizes[0] * sizes[1] * sizes[2];
    const Game g = pattern_game(sizes, rng() & ((std::uint64_t{1} << total) - 1));
    const auto st = build_structure(g);
    for (std::size_t l = 0; l < st.components.size(); ++l) {
      ASSERT_EQ(st.components[l].rectangular, rectangularity_via_exits(g, st, l));
    }
  }
}

TEST(StructureProperty, ExitsAreMinimalAndComplete) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<std::size_t> sizes{3, 3, 2};
    const Game g = pattern_game(sizes, rng() & ((std::uint64_t{1} << 18) - 1));
    const auto st = build_structure(g);
    for (std::size_t l = 0; l < st.components.size(); ++l) {
      for (const Support& s : maximal_supports(g, st, l)) {
        for (const Exit& e : exits_at_support(g, s)) {
          // The exit profile absorbs against some completion in S.
          bool absorbs = false;
          for (std::size_t idx = 0; idx < g.num_profiles(); ++idx) {
            const Profile a = g.profile(idx);
            bool match = true;
            for (std::size_t i = 0; i < 3 && match; ++i) {
              auto it = std::find(e.coalition.begin(), e.coalition.end(), static_cast<int>(i));
              if (it != e.coalition.end()) {
                match = a[i] == e.actions[static_cast<std::size_t>(it - e.coalition.begin())];
              } else {
                match = std::binary_search(s[i].begin(), s[i].end(), a[i]);
              }
            }
            if (match && g.absorbing(idx)) absorbs = true;
          }
          EXPECT_TRUE(absorbs);
        }
      }
    }
  }
}

TEST(StructureProperty, EnlargingSupportKeepsAbsorbingReachability) {
  // An exit at a smaller support still absorbs against any larger support
  // inside the same component.
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const Game g = pattern_game({3, 3}, rng() & 0x1FF);
    const auto st = build_structure(g);
    for (std::size_t l = 0; l < st.components.size(); ++l) {
      const auto all = product_supports(g, st, l);
      for (const Support& small : all) {
        for (const Support& big : all) {
          bool contained = true;
          for (std::size_t i = 0; i < 2; ++i) {
            contained = contained && std::includes(big[i].begin(), big[i].end(),
                                                   small[i].begin(), small[i].end());
          }
          if (!contained) continue;
          for (const Exit& e : exits_at_support(g, small)) {
            Support probe = big;
            for (std::size_t k = 0; k < e.coalition.size(); ++k) {
              probe[static_cast<std::size_t>(e.coalition[k])] = {e.actions[k]};
            }
            EXPECT_FALSE(rectangle_nonabsorbing(g, probe));
          }
        }
      }
    }
  }
}
