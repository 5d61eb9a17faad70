#pragma once

#include <cstdint>
#include <vector>

#include "absorbing/game.hpp"

namespace absorbing {

struct GenerateOptions {
  bool allow_rectangular = false;
  bool allow_nonabsorbing_equilibrium = false;
  double payoff_lo = 0.05;  // payoffs uniform on [payoff_lo, payoff_hi]
  double payoff_hi = 1.0;
  double deterministic_share = 0.5;  // share of absorbing profiles with p = 1
  std::size_t max_attempts = 100000;
};

// Rejection-samples absorption patterns until the constraints hold. Throws
// GenerationBudgetExceeded after max_attempts, InvalidArgument on bad sizes.
Game generate_instance(const std::vector<std::size_t>& actions, std::uint64_t seed,
                       const GenerateOptions& opt = {});

}  // namespace absorbing
