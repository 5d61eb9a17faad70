#pragma once

// The payoff dynamics: best absorbing responses rho, the W / W_H / W_L
// partition on a discretized X, and the maps f and mu.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absorbing/game.hpp"
#include "absorbing/minmax.hpp"
#include "absorbing/structure.hpp"

namespace absorbing {

// rho_i(x) per player, kNoAbsorbingReply when player i has no absorbing reply.
struct Rho {
  std::vector<double> value;
  std::vector<int> action;  // -1 when value is kNoAbsorbingReply
  bool finite(std::size_t i) const { return action[i] >= 0; }
};

// Throws AbsorbingProfile if p(x) > 0.
Rho rho(const Game& g, const MixedProfile& x);

// min_i (w_i - rho_i(x)); players without an absorbing reply contribute +inf.
double slack(std::span<const double> w, const Rho& r);

// Simplex grids of mesh 1/steps on every maximal product support of every
// component. Points on faces carry their own (smaller) support, and their
// exit flags are computed for that support.
class SearchGrid {
 public:
  struct Block {
    std::size_t component = 0;
    Support support;
    int steps = 0;
    // Per player: compositions of `steps` over the support actions.
    std::vector<std::vector<std::vector<int>>> comps;
    // Per player, per composition: compositions one unit move away.
    std::vector<std::vector<std::vector<std::size_t>>> moves;
    std::size_t offset = 0;
    std::size_t count = 0;
  };

  static SearchGrid build(const Game& g, const AbsorptionStructure& st, double mesh,
                          std::size_t max_points_per_block = 200000);

  std::size_t size() const { return support_id_.size(); }
  std::size_t num_players() const { return n_; }
  double mesh() const { return mesh_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  MixedProfile point(std::size_t k) const;
  double rho(std::size_t k, std::size_t i) const { return rho_[k * n_ + i]; }
  int rho_action(std::size_t k, std::size_t i) const { return act_[k * n_ + i]; }
  Rho rho_at(std::size_t k) const;
  const Support& support(std::size_t k) const { return supports_[support_id_[k]]; }
  const std::vector<Exit>& exits(std::size_t k) const { return exits_[support_id_[k]]; }
  bool has_joint_exit(std::size_t k) const { return joint_[support_id_[k]]; }
  // Grid points one unit move away inside the same block.
  std::vector<std::size_t> neighbors(std::size_t k) const;

 private:
  std::size_t block_of(std::size_t k) const;
  std::vector<std::size_t> digits(const Block& b, std::size_t local) const;

  std::size_t n_ = 0;
  double mesh_ = 0.0;
  std::vector<std::size_t> actions_;
  std::vector<Block> blocks_;
  std::vector<double> rho_;
  std::vector<int> act_;
  std::vector<std::uint32_t> support_id_;
  std::vector<Support> supports_;
  std::vector<std::vector<Exit>> exits_;
  std::vector<bool> joint_;
};

// Profile where coalition members play their exit actions and the others x.
MixedProfile exit_profile(const Game& g, const MixedProfile& x, const Exit& e);

// A joint exit at some grid point whose payoff weakly dominates rho(x).
struct ShortCircuit {
  MixedProfile x;
  Exit exit;
  PayoffVector payoff;  // r(a_J, x_{-J})
  Rho rho;
  std::size_t grid_index = 0;
};
std::optional<ShortCircuit> lemma_multi_check(const Game& g, const SearchGrid& grid);
// The same condition at a single profile and exit.
bool dominates_rho(const PayoffVector& payoff, const Rho& r);

enum class Case { W, WH, WL };
std::string case_name(Case c);

struct Classification {
  Case tag = Case::WL;
  PayoffVector w;
  double s_star = 0.0;  // max over grid of min_i (w_i - rho_i)
  MixedProfile x;       // witness (W, WH) or one-shot equilibrium (WL)
  Rho rho;              // at x, for W and WH
  int i0 = -1;          // equality player (W) or a player with e_i0 < rho_i0 (WH, -1 if none)
  std::optional<Exit> exit;
  PayoffVector exit_payoff;
  bool margin = true;   // WH: e_i0 < rho_i0 - epsilon held
  bool refined = false; // W: located by bisection along a grid edge
  std::optional<std::size_t> grid_index;
  double nash_regret = 0.0;
};

struct ClassifyOptions {
  double epsilon = 0.1;
  double tol_class = 1e-6;
  double eps_nash = 1e-6;
  std::uint64_t seed = 1;
};

// Throws WitnessNotFound or NashNotFound.
Classification classify(const Game& g, const SearchGrid& grid, std::span<const double> w,
                        const ClassifyOptions& opt);

struct DynamicsStep {
  PayoffVector w;
  Classification cls;
  PayoffVector f;
  double mu = 0.0;
  double q = 0.0;      // W: p(a_i0(x), x_{-i0})
  double alpha = 0.0;  // WH
  int alpha_player = -1;
};

// Throws InvalidWitness if f(w) leaves Y = prod [v_i - epsilon, 1] by more
// than tol_class, or mu is not positive.
DynamicsStep step_f(const Game& g, const Classification& cls, double epsilon,
                    std::span<const double> v, double tol_class);

}  // namespace absorbing
