#pragma once

// Block strategy profile built from an orbit (or from a short-circuit
// certificate): stationary profiles per block, horizons, frequency tests,
// and a switch to minmax punishment after detection.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absorbing/dynamics.hpp"
#include "absorbing/minmax.hpp"
#include "absorbing/orbit.hpp"
#include "json.hpp"

namespace absorbing {

enum class BlockKind { Case1, Case2, Case3, Certificate };
std::string block_kind_name(BlockKind k);

struct BlockSpec {
  BlockKind kind = BlockKind::Case1;
  MixedProfile y;
  std::uint64_t T = 1;
  double beta = 0.0;
  double target = 0.0;   // absorption mass the block aims for
  double mass = 0.0;     // 1 - (1 - p(y))^T
  double p = 0.0;        // p(y)
  PayoffVector payoff;   // r(y), empty when p(y) = 0
  double eta = 0.0;
  bool tested = false;
  std::size_t n_min = 100;
  int i0 = -1;                // Case 2: the player mixing onto its best absorbing reply
  int action = -1;            // Case 2: that reply
  std::optional<Exit> exit;   // Case 3 and certificates
  // Largest r_i(b, y_-i) - w_i over absorbing actions b inside supp(y_i),
  // with w the continuation target; informational.
  double deviation_excess = 0.0;
};

struct StrategySpec {
  std::vector<BlockSpec> blocks;
  std::vector<std::uint64_t> start;  // N^(k) = sum_{m<k} T^(m)
  MixedProfile tail;                 // played untested after the last block
  std::vector<MixedProfile> punish;  // per punished player
  PayoffVector punish_value;         // max(0, rho_i) against punish(i)
  double epsilon = 0.1;
  bool certificate = false;
  PayoffVector target;               // w^(0), or the certificate payoff
};

struct SynthesisOptions {
  double epsilon = 0.1;
  std::size_t n_min = 100;
  double tol_block = 1e-3;
  int beta_first_exponent = 3;  // beta ranges over 2^-3, 2^-4, ...
  int beta_last_exponent = 40;
  double case2_max_horizon = 1e7;
  double case3_min_exit_plays = 20.0;
};

// Throws HorizonOverflow if no admissible beta exists for some block.
StrategySpec synthesize(const Game& g, const Orbit& orbit, const MinmaxResult& mm,
                        const SynthesisOptions& opt = {});

// The xi profile of a short-circuit certificate: coalition members put beta
// on their exit actions; after a tested block the profile continues untested.
StrategySpec certificate_spec(const Game& g, const ShortCircuit& sc, const MinmaxResult& mm,
                              const SynthesisOptions& opt = {});

// Nearest T >= 1 with (1 - p)^T closest to 1 - target, and the mass it realizes.
double block_horizon(double target, double p);
double block_mass(double T, double p);

// sqrt(ln(2 |A_i| T / eta) / (2 n)).
double hoeffding_radius(std::size_t num_actions, std::uint64_t T, double eta, std::uint64_t n);

// Follows play stage by stage and applies the tests of the current block.
class Monitor {
 public:
  explicit Monitor(const StrategySpec& spec);
  // Back to stage 1 of block 0 with no detection.
  void reset();

  // Records one stage of (nonabsorbing) play. Returns the lowest-index
  // player detected at this stage, or -1.
  int observe(std::span<const int> actions);

  const MixedProfile& current() const;
  std::size_t block() const { return block_; }  // blocks.size() once in the tail
  bool in_tail() const { return block_ >= spec_->blocks.size(); }
  int punished() const { return punished_; }
  std::uint64_t stage_in_block() const { return n_; }

  // The frequency rule: some |count_a - n y_a| exceeds n times the radius.
  static bool frequency_violation(double max_abs_count_gap, std::uint64_t n, double log_term);
  double log_term(std::size_t player) const { return log_terms_[block_][player]; }

 private:
  void enter_block(std::size_t k);

  const StrategySpec* spec_;
  std::vector<std::vector<double>> log_terms_;
  std::size_t block_ = 0;
  std::uint64_t n_ = 0;
  std::vector<std::vector<std::uint64_t>> counts_;
  int punished_ = -1;
};

// ln(2 |A_i| T / eta) for a tested block.
double block_log_term(const BlockSpec& b, std::size_t player);

// Mixed action profile sigma*(history).
MixedProfile strategy_at(const StrategySpec& spec, std::span<const Profile> history);

nlohmann::json block_to_json(const BlockSpec& b);
nlohmann::json spec_to_json(const StrategySpec& s);
StrategySpec spec_from_json(const nlohmann::json& j);

}  // namespace absorbing
