#pragma once

// Absorption structure: the nonabsorbing profiles B, their connected
// components under single-player moves, rectangularity, and exits.

#include <cstddef>
#include <optional>
#include <vector>

#include "absorbing/game.hpp"

namespace absorbing {

// Per-player action subsets S_i, each sorted; the product S = prod S_i.
using Support = std::vector<std::vector<int>>;

struct Component {
  std::vector<std::size_t> members;           // profile indices, ascending
  std::vector<std::vector<int>> projections;  // B^l_i, ascending
  bool rectangular = false;
  // A profile in prod_i B^l_i that is not in the component (non-rectangular only).
  std::optional<Profile> witness;
};

struct AbsorptionStructure {
  std::vector<std::size_t> nonabsorbing;  // B, ascending profile indices
  std::vector<Component> components;      // ordered by smallest member
  std::vector<int> component_of;          // per profile index, -1 if absorbing
};

struct Exit {
  std::vector<int> coalition;  // ascending player indices
  std::vector<int> actions;    // one per coalition member
  bool joint() const { return coalition.size() >= 2; }
  bool operator==(const Exit&) const = default;
};

AbsorptionStructure build_structure(const Game& g);

struct PreconditionResult {
  bool pass = true;
  std::optional<std::size_t> rectangular_component;  // first offender
};
PreconditionResult check_precondition(const AbsorptionStructure& s);

bool rectangle_nonabsorbing(const Game& g, const Support& s);

// All (J, a_J) with p(a_J, b_{-J}) > 0 for some b_{-J} in S_{-J} and
// p(a_J', b_{-J'}) = 0 for every strict J' of J and b_{-J'} in S_{-J'}.
// Throws SupportNotNonabsorbing if prod S_i is not inside B.
std::vector<Exit> exits_at_support(const Game& g, const Support& s);
bool has_joint_exit(const Game& g, const Support& s);

// Every product support contained in component l (all nonempty S_i).
std::vector<Support> product_supports(const Game& g, const AbsorptionStructure& s, std::size_t l);
// Product supports in component l not strictly contained in another one.
std::vector<Support> maximal_supports(const Game& g, const AbsorptionStructure& s, std::size_t l);

// True iff no product support inside component l has a joint exit.
bool rectangularity_via_exits(const Game& g, const AbsorptionStructure& s, std::size_t l);

// A product support S inside B such that A_i x S_{-i} is nonabsorbing for
// every i, returned as the uniform profile on S; none if no such S exists.
std::optional<MixedProfile> find_nonabsorbing_equilibrium(const Game& g,
                                                          const AbsorptionStructure& s);

// Support of a mixed profile as a Support.
Support support_of(const MixedProfile& x);

}  // namespace absorbing
