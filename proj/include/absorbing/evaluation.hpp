#pragma once

// Certification of a block strategy: exact payoff of the no-detection path,
// seeded Monte Carlo play, and unilateral deviation families d1..d5.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absorbing/orbit.hpp"
#include "absorbing/strategy.hpp"
#include "json.hpp"

namespace absorbing {

struct EvalReport {
  PayoffVector gamma;              // Z^(0)
  std::vector<PayoffVector> Z;     // Z^(0..K0); Z^(K0) is the tail payoff
  std::vector<double> masses;      // realized block masses m_k
  std::vector<double> ledger;      // ||m_k r(y_k) + (1-m_k) w^(k+1) - w^(k)||_inf (orbit specs)
  std::vector<double> eta;         // eta^(k)
  double total_absorption = 0.0;   // 1 - prod (1 - m_k)
  double detection_bound = 0.0;    // sum_k eta^(k) |I|
  double distance_to_target = 0.0; // ||gamma - target||_inf
};

// The orbit, when given, supplies w^(k) for the ledger.
EvalReport exact_eval(const Game& g, const StrategySpec& spec, const Orbit* orbit = nullptr);

// A deviation by one player: a replacement mixed action per block (empty
// entries follow the strategy). After detection the deviator is credited
// its best payoff against the punishment profile.
struct Deviation {
  std::size_t player = 0;
  std::vector<std::vector<double>> per_block;
};

struct SimReport {
  std::size_t episodes = 0;
  PayoffVector mean;
  PayoffVector se;
  double absorbed_fraction = 0.0;   // absorbed before detection or the tail
  double detection_fraction = 0.0;  // some test fired before absorption
  double detection_se = 0.0;
  double mean_stages = 0.0;         // stages played before absorption, detection, or the tail
};

// Episode e draws from an mt19937_64 seeded by SplitMix64(seed, e), so the
// result does not depend on how episodes are scheduled. Throws
// InvalidArgument for zero episodes.
SimReport simulate(const Game& g, const StrategySpec& spec, std::size_t episodes,
                   std::uint64_t seed, const Deviation* dev = nullptr);

// A pure deviation that is stationary within each block: -1 follows the strategy.
struct PurePlan {
  std::vector<int> block_action;
  int tail_action = -1;
};

// Exact value of a pure plan to `player`, other players following the strategy.
double plan_value(const Game& g, const StrategySpec& spec, std::size_t player,
                  const PurePlan& plan);
// Stage-by-stage computation of the same quantity; throws InvalidArgument
// when the total horizon exceeds max_stages.
double plan_value_bruteforce(const Game& g, const StrategySpec& spec, std::size_t player,
                             const PurePlan& plan, std::uint64_t max_stages = 1000000);

// First stage of a block at which constant play of `action` by `player`
// triggers a test; none if it survives the whole block.
std::optional<std::uint64_t> detection_stage(const StrategySpec& spec, std::size_t block,
                                             std::size_t player, int action);

struct DeviationEntry {
  std::string family;
  std::string label;
  std::optional<std::size_t> block;
  double payoff = 0.0;
  double gain = 0.0;
  double se = 0.0;
  bool exact = true;
};

struct DeviationReport {
  std::size_t player = 0;
  double baseline = 0.0;         // exact gamma_i
  std::vector<DeviationEntry> entries;
  double max_gain = 0.0;         // over entries, at least 0 when entries are empty
  double max_gain_less_3se = 0.0;
};

struct DeviationOptions {
  std::set<std::string> families{"d1", "d2", "d3", "d4", "d5"};
  std::size_t episodes = 100000;
  std::uint64_t seed = 1;
  double tilt = 0.1;
};

DeviationReport deviation_suite(const Game& g, const StrategySpec& spec, std::size_t player,
                                const DeviationOptions& opt = {});

nlohmann::json eval_to_json(const EvalReport& r);
nlohmann::json sim_to_json(const SimReport& r);
nlohmann::json deviation_to_json(const DeviationReport& r);

}  // namespace absorbing
