#include "absorbing/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "absorbing/errors.hpp"
#include "absorbing/kernels.hpp"

namespace absorbing {

std::vector<int> MixedProfile::support(std::size_t i) const {
  std::vector<int> s;
  for (std::size_t a = 0; a < x_[i].size(); ++a) {
    if (x_[i][a] > 0.0) s.push_back(static_cast<int>(a));
  }
  return s;
}

bool MixedProfile::is_pure() const {
  for (const auto& xi : x_) {
    int ones = 0;
    for (double v : xi) {
      if (v == 1.0) ++ones;
      else if (v != 0.0) return false;
    }
    if (ones != 1) return false;
  }
  return true;
}

Profile MixedProfile::pure_profile() const {
  Profile a(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    a[i] = static_cast<int>(std::max_element(x_[i].begin(), x_[i].end()) - x_[i].begin());
  }
  return a;
}

std::size_t Game::index(std::span<const int> profile) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    idx += static_cast<std::size_t>(profile[i]) * strides_[i];
  }
  return idx;
}

Profile Game::profile(std::size_t index) const {
  Profile a(num_players());
  for (std::size_t i = 0; i < num_players(); ++i) {
    a[i] = static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return a;
}

PayoffVector Game::r(std::size_t index) const {
  const std::size_t n = num_players();
  return PayoffVector(r_.begin() + index * n, r_.begin() + (index + 1) * n);
}

bool Game::operator==(const Game& other) const {
  return players_ == other.players_ && actions_ == other.actions_ && p_ == other.p_ &&
         r_ == other.r_;
}

void Game::build_tables() {
  const std::size_t n = num_players();
  const std::size_t total = p_.size();
  full_.assign((n + 1) * total, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    full_[idx] = p_[idx];
    for (std::size_t j = 0; j < n; ++j) full_[(1 + j) * total + idx] = p_[idx] * r_[idx * n + j];
  }
  slices_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t others = total / num_actions(i);
    auto& slice = slices_[i];
    slice.assign(num_actions(i) * (n + 1) * others, 0.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      const Profile a = profile(idx);
      std::size_t o = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        o = o * num_actions(j) + static_cast<std::size_t>(a[j]);
      }
      const std::size_t row0 = static_cast<std::size_t>(a[i]) * (n + 1);
      slice[row0 * others + o] = p_[idx];
      for (std::size_t k = 0; k < n; ++k) {
        slice[(row0 + 1 + k) * others + o] = p_[idx] * r_[idx * n + k];
      }
    }
  }
}

Game validate_game(const RawGame& raw) {
  const std::size_t n = raw.players.size();
  if (n < 2) throw Error(ErrorCode::InvalidGame, "a game needs at least two players");
  if (n > kMaxPlayers) {
    throw Error(ErrorCode::TooManyPlayers,
                "at most " + std::to_string(kMaxPlayers) + " players are supported");
  }
  if (raw.actions.size() != n) {
    throw Error(ErrorCode::InvalidGame, "one action list per player is required");
  }
  Game g;
  g.players_ = raw.players;
  g.actions_ = raw.actions;
  g.metadata_ = raw.metadata;
  g.strides_.assign(n, 1);
  std::size_t total = 1;
  for (std::size_t i = n; i-- > 0;) {
    if (raw.actions[i].empty()) {
      throw Error(ErrorCode::InvalidGame, "player " + raw.players[i] + " has no actions");
    }
    g.strides_[i] = total;
    total *= raw.actions[i].size();
    if (total > (std::size_t{1} << 24)) {
      throw Error(ErrorCode::InvalidGame, "action profile space too large");
    }
  }
  g.p_.assign(total, 0.0);
  g.r_.assign(total * n, 0.0);
  std::vector<bool> seen(total, false);
  for (const RawEntry& e : raw.entries) {
    if (e.profile.size() != n) {
      throw Error(ErrorCode::InvalidGame, "entry profile has wrong length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (e.profile[i] < 0 || static_cast<std::size_t>(e.profile[i]) >= raw.actions[i].size()) {
        throw Error(ErrorCode::InvalidGame, "entry profile action index out of range");
      }
    }
    const std::size_t idx = g.index(e.profile);
    if (seen[idx]) throw Error(ErrorCode::InvalidGame, "duplicate entry for a profile");
    seen[idx] = true;
    if (!(e.p >= 0.0 && e.p <= 1.0)) {
      std::ostringstream os;
      os << "absorption probability " << e.p << " outside [0,1]";
      throw Error(ErrorCode::ProbabilityOutOfRange, os.str());
    }
    if (e.p == 0.0) continue;  // r is never read on nonabsorbing profiles
    if (e.r.empty()) throw Error(ErrorCode::MissingPayoff, "absorbing entry without payoff");
    if (e.r.size() != n) throw Error(ErrorCode::InvalidGame, "payoff vector has wrong length");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(e.r[i] > 0.0)) {
        throw Error(ErrorCode::NonPositivePayoff, "absorbing payoffs must be positive");
      }
      if (e.r[i] > 1.0) throw Error(ErrorCode::InvalidGame, "absorbing payoffs must be at most 1");
      g.r_[idx * n + i] = e.r[i];
    }
    g.p_[idx] = e.p;
  }
  g.build_tables();
  return g;
}

void check_profile(const Game& g, const MixedProfile& x) {
  if (x.num_players() != g.num_players()) {
    throw Error(ErrorCode::InvalidProfile, "profile has wrong number of players");
  }
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    if (x[i].size() != g.num_actions(i)) {
      throw Error(ErrorCode::InvalidProfile, "mixed action has wrong length");
    }
    double sum = 0.0;
    for (double v : x[i]) {
      if (!(v >= 0.0)) throw Error(ErrorCode::InvalidProfile, "negative probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
      throw Error(ErrorCode::InvalidProfile, "mixed action does not sum to 1");
    }
  }
}

MixedProfile pure_profile(const Game& g, std::span<const int> profile) {
  std::vector<std::vector<double>> x(g.num_players());
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    x[i].assign(g.num_actions(i), 0.0);
    x[i][static_cast<std::size_t>(profile[i])] = 1.0;
  }
  return MixedProfile(std::move(x));
}

MixedProfile uniform_profile(const Game& g, const std::vector<std::vector<int>>& support) {
  std::vector<std::vector<double>> x(g.num_players());
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    x[i].assign(g.num_actions(i), 0.0);
    for (int a : support[i]) x[i][static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(support[i].size());
  }
  return MixedProfile(std::move(x));
}

void product_weights(const MixedProfile& x, std::size_t skip, std::vector<double>& out,
                     std::vector<double>& scratch) {
  out.assign(1, 1.0);
  for (std::size_t j = 0; j < x.num_players(); ++j) {
    if (j == skip) continue;
    scratch.resize(out.size() * x[j].size());
    kernels::kron(out, x[j], scratch);
    out.swap(scratch);
  }
}

Contraction contract(const Game& g, const MixedProfile& x) {
  thread_local std::vector<double> w, scratch, out;
  const std::size_t n = g.num_players();
  product_weights(x, n, w, scratch);
  out.resize(n + 1);
  kernels::gemv(g.full_table(), n + 1, w, out);
  Contraction c;
  c.p = std::clamp(out[0], 0.0, 1.0);
  c.pr.assign(out.begin() + 1, out.end());
  return c;
}

std::vector<Contraction> contract_unilateral(const Game& g, std::size_t i, const MixedProfile& x) {
  thread_local std::vector<double> w, scratch, out;
  const std::size_t n = g.num_players();
  product_weights(x, i, w, scratch);
  const std::size_t rows = g.num_actions(i) * (n + 1);
  out.resize(rows);
  kernels::gemv(g.player_table(i), rows, w, out);
  std::vector<Contraction> res(g.num_actions(i));
  for (std::size_t a = 0; a < g.num_actions(i); ++a) {
    res[a].p = std::clamp(out[a * (n + 1)], 0.0, 1.0);
    res[a].pr.assign(out.begin() + static_cast<std::ptrdiff_t>(a * (n + 1) + 1),
                     out.begin() + static_cast<std::ptrdiff_t>((a + 1) * (n + 1)));
  }
  return res;
}

double absorb_prob_mixed(const Game& g, const MixedProfile& x) {
  if (x.is_pure()) return g.p(x.pure_profile());
  return contract(g, x).p;
}

PayoffVector absorb_payoff_mixed(const Game& g, const MixedProfile& x) {
  if (x.is_pure()) {
    const std::size_t idx = g.index(x.pure_profile());
    if (!g.absorbing(idx)) throw Error(ErrorCode::NonAbsorbingProfile, "p(x) = 0");
    return g.r(idx);
  }
  Contraction c = contract(g, x);
  if (!(c.p > 0.0)) throw Error(ErrorCode::NonAbsorbingProfile, "p(x) = 0");
  for (double& v : c.pr) v /= c.p;
  return c.pr;
}

PayoffVector one_shot_payoff(const Game& g, std::span<const double> w, const MixedProfile& x) {
  const Contraction c = contract(g, x);
  PayoffVector u(g.num_players());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = c.pr[i] + (1.0 - c.p) * w[i];
  return u;
}

}  // namespace absorbing
