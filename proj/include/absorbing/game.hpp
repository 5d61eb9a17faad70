#pragma once

// Positive recursive absorbing games: a single nonabsorbing state, stage
// payoff 0 there, and absorbing payoffs in (0, 1].

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace absorbing {

using Profile = std::vector<int>;
using PayoffVector = std::vector<double>;

inline constexpr std::size_t kMaxPlayers = 8;
inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kCompareTol = 1e-9;

struct RawEntry {
  Profile profile;
  double p = 0.0;
  std::vector<double> r;  // empty when absent
};

// Unvalidated game as read from a file.
struct RawGame {
  std::vector<std::string> players;
  std::vector<std::vector<std::string>> actions;
  std::vector<RawEntry> entries;
  std::string metadata;  // opaque JSON text, carried through serialization
};

// One probability vector per player.
class MixedProfile {
 public:
  MixedProfile() = default;
  explicit MixedProfile(std::vector<std::vector<double>> x) : x_(std::move(x)) {}

  std::size_t num_players() const { return x_.size(); }
  const std::vector<double>& operator[](std::size_t i) const { return x_[i]; }
  std::vector<double>& operator[](std::size_t i) { return x_[i]; }
  const std::vector<std::vector<double>>& data() const { return x_; }

  std::vector<int> support(std::size_t i) const;
  bool is_pure() const;
  Profile pure_profile() const;  // requires is_pure()

  bool operator==(const MixedProfile&) const = default;

 private:
  std::vector<std::vector<double>> x_;
};

class Game {
 public:
  std::size_t num_players() const { return actions_.size(); }
  std::size_t num_actions(std::size_t i) const { return actions_[i].size(); }
  std::size_t num_profiles() const { return p_.size(); }
  const std::vector<std::string>& players() const { return players_; }
  const std::vector<std::string>& actions(std::size_t i) const { return actions_[i]; }
  const std::string& metadata() const { return metadata_; }

  // Row-major, player 0 slowest; index order equals lexicographic order.
  std::size_t index(std::span<const int> profile) const;
  Profile profile(std::size_t index) const;

  double p(std::size_t index) const { return p_[index]; }
  double p(std::span<const int> profile) const { return p_[index(profile)]; }
  // Defined only where p > 0.
  double r(std::size_t index, std::size_t player) const {
    return r_[index * num_players() + player];
  }
  PayoffVector r(std::size_t index) const;
  bool absorbing(std::size_t index) const { return p_[index] > 0.0; }

  // Row block [p, p*r_0, ..., p*r_{n-1}] (n+1 rows) over all profiles.
  std::span<const double> full_table() const { return full_; }
  // Row block for player i: rows a_i*(n+1)+k hold [p, p*r_0, ...](a_i, .),
  // columns enumerate the other players' profiles row-major.
  std::span<const double> player_table(std::size_t i) const { return slices_[i]; }
  std::size_t others_size(std::size_t i) const { return num_profiles() / num_actions(i); }

  bool operator==(const Game& other) const;

  friend Game validate_game(const RawGame& raw);

 private:
  void build_tables();

  std::vector<std::string> players_;
  std::vector<std::vector<std::string>> actions_;
  std::vector<std::size_t> strides_;
  std::vector<double> p_;
  std::vector<double> r_;
  std::vector<double> full_;
  std::vector<std::vector<double>> slices_;
  std::string metadata_;
};

// Checks the model's invariants and returns the canonical game. Throws
// Error with NonPositivePayoff, ProbabilityOutOfRange, MissingPayoff,
// TooManyPlayers or InvalidGame.
Game validate_game(const RawGame& raw);

// Throws InvalidProfile unless x has one distribution per player, each
// nonnegative and summing to 1 within kSimplexTol.
void check_profile(const Game& g, const MixedProfile& x);

MixedProfile pure_profile(const Game& g, std::span<const int> profile);
MixedProfile uniform_profile(const Game& g, const std::vector<std::vector<int>>& support);

// p(x) = sum_a p(a) prod_j x_j(a_j).
double absorb_prob_mixed(const Game& g, const MixedProfile& x);

// r(x) = sum_a p(a) r(a) prod_j x_j(a_j) / p(x); throws NonAbsorbingProfile
// when p(x) = 0.
PayoffVector absorb_payoff_mixed(const Game& g, const MixedProfile& x);

// u^w(x) = sum_a p(a) r(a) prod x + (1 - p(x)) w.
PayoffVector one_shot_payoff(const Game& g, std::span<const double> w,
                             const MixedProfile& x);

// Unnormalized totals: p(x) and p(x) r_j(x) for every j.
struct Contraction {
  double p = 0.0;
  std::vector<double> pr;
};
Contraction contract(const Game& g, const MixedProfile& x);

// For every action a_i of player i: p(a_i, x_{-i}) and p r_j(a_i, x_{-i}).
// x_i is ignored.
std::vector<Contraction> contract_unilateral(const Game& g, std::size_t i,
                                             const MixedProfile& x);

// Product weights prod_{j != skip} x_j over the other players' profiles,
// row-major; skip = num_players() builds the full product.
void product_weights(const MixedProfile& x, std::size_t skip,
                     std::vector<double>& out, std::vector<double>& scratch);

}  // namespace absorbing
