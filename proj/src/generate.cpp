#include "absorbing/generate.hpp"

#include <random>
#include <string>

#include "absorbing/errors.hpp"
#include "absorbing/structure.hpp"

namespace absorbing {

Game generate_instance(const std::vector<std::size_t>& actions, std::uint64_t seed,
                       const GenerateOptions& opt) {
  if (actions.size() < 2) throw Error(ErrorCode::InvalidArgument, "at least two players");
  if (!(opt.payoff_lo > 0.0 && opt.payoff_lo <= opt.payoff_hi && opt.payoff_hi <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "payoff interval must lie in (0, 1]");
  }
  RawGame raw;
  std::size_t total = 1;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == 0) throw Error(ErrorCode::InvalidArgument, "every player needs an action");
    raw.players.push_back(std::to_string(i + 1));
    std::vector<std::string> names;
    for (std::size_t a = 0; a < actions[i]; ++a) {
      names.push_back("a" + std::to_string(i + 1) + "_" + std::to_string(a));
    }
    raw.actions.push_back(std::move(names));
    total *= actions[i];
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> pay(opt.payoff_lo, opt.payoff_hi);
  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    const double density = 0.3 + 0.5 * u(rng);
    raw.entries.clear();
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (u(rng) > density) continue;
      RawEntry e;
      e.profile.assign(actions.size(), 0);
      std::size_t rem = idx;
      for (std::size_t i = actions.size(); i-- > 0;) {
        e.profile[i] = static_cast<int>(rem % actions[i]);
        rem /= actions[i];
      }
      e.p = u(rng) < opt.deterministic_share ? 1.0 : 0.1 + 0.9 * u(rng);
      for (std::size_t i = 0; i < actions.size(); ++i) e.r.push_back(pay(rng));
      raw.entries.push_back(std::move(e));
    }
    raw.metadata = "{\"generator\":{\"seed\":" + std::to_string(seed) +
                   ",\"attempt\":" + std::to_string(attempt) + "}}";
    Game g = validate_game(raw);
    const AbsorptionStructure st = build_structure(g);
    if (!opt.allow_rectangular && !check_precondition(st).pass) continue;
    if (!opt.allow_nonabsorbing_equilibrium && find_nonabsorbing_equilibrium(g, st)) continue;
    return g;
  }
  throw Error(ErrorCode::GenerationBudgetExceeded,
              "no admissible instance within " + std::to_string(opt.max_attempts) + " attempts");
}

}  // namespace absorbing
