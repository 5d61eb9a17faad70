#pragma once

// Nash equilibria of the one-shot game G(w) with payoffs
// u^w(a) = p(a) r(a) + (1 - p(a)) w.

#include <cstdint>
#include <span>
#include <string>

#include "absorbing/game.hpp"

namespace absorbing {

struct NashOptions {
  double eps_nash = 1e-6;
  std::uint64_t seed = 1;
  // Only accept equilibria with p(x) above this threshold; negative disables.
  double min_absorption = -1.0;
  std::size_t newton_starts = 4;
  std::size_t regret_iterations = 20000;
};

struct NashResult {
  MixedProfile x;
  double regret = 0.0;  // max over players of best-response gain
  std::string method;   // "pure", "support-enumeration", "regret-matching", "newton"
};

// max_i [max_a u_i(a, x_{-i}) - u_i(x)].
double nash_regret(const Game& g, std::span<const double> w, const MixedProfile& x);

// Throws NashNotFound if no eps_nash-equilibrium meeting the absorption
// requirement is located.
NashResult solve_one_shot_nash(const Game& g, std::span<const double> w,
                               const NashOptions& opt = {});

}  // namespace absorbing
