#pragma once

// Threat values: minmax v_i and stationary punishment profiles.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "absorbing/game.hpp"

namespace absorbing {

inline constexpr double kNoAbsorbingReply = -std::numeric_limits<double>::infinity();

struct BestReply {
  double rho = kNoAbsorbingReply;  // best absorbing payoff, -inf if none
  int action = -1;                 // argmax, lowest index on ties; -1 if none
  double value() const { return rho > 0.0 ? rho : 0.0; }
};

// Player i's best absorbing reply against x_{-i} (x_i is ignored).
BestReply best_reply(const Game& g, std::size_t i, const MixedProfile& x);
inline double best_reply_value(const Game& g, std::size_t i, const MixedProfile& x) {
  return best_reply(g, i, x).value();
}

struct MinmaxEntry {
  double value = 0.0;
  double lower = 0.0;     // certified lower bound (two players) or 0
  MixedProfile punish;    // opponents' profile; the entry for the player is uniform
  bool certified = false;
  int iterations = 0;     // bisection steps (two players) or block sweeps
  int restarts = 0;
  double residual = 0.0;  // value - lower
};

struct MinmaxResult {
  std::vector<MinmaxEntry> players;
  const MixedProfile& punish(std::size_t i) const { return players.at(i).punish; }
  std::vector<double> values() const;
};

struct MinmaxOptions {
  double tol_v = 1e-6;
  std::size_t restarts = 64;
  std::uint64_t seed = 1;
};

MinmaxEntry minmax(const Game& g, std::size_t i, const MinmaxOptions& opt = {});
MinmaxResult minmax_all(const Game& g, const MinmaxOptions& opt = {});

// Discounted value v_{i,lambda}: fixed point of v = (1 - lambda) val[p r_i + (1 - p) v],
// two-player games only.
double discounted_value(const Game& g, std::size_t i, double lambda);

struct DiscountedCheck {
  std::vector<double> lambdas;
  std::vector<double> values;
  double extrapolated = 0.0;
};
// Values at lambda in {1e-2, 1e-3, 1e-4} and a linear extrapolation to 0;
// none for more than two players.
std::optional<DiscountedCheck> discounted_cross_check(const Game& g, std::size_t i);

}  // namespace absorbing
