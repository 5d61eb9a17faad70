#include "absorbing/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "absorbing/errors.hpp"
#include "absorbing/lp.hpp"

namespace absorbing {

BestReply best_reply(const Game& g, std::size_t i, const MixedProfile& x) {
  BestReply br;
  const auto per = contract_unilateral(g, i, x);
  for (std::size_t a = 0; a < per.size(); ++a) {
    if (!(per[a].p > 0.0)) continue;
    const double v = per[a].pr[i] / per[a].p;
    if (v > br.rho) {
      br.rho = v;
      br.action = static_cast<int>(a);
    }
  }
  return br;
}

std::vector<double> MinmaxResult::values() const {
  std::vector<double> v;
  for (const auto& e : players) v.push_back(e.value);
  return v;
}

namespace {

// N = p r_i and D = p as |A_i| x |A_j| matrices, other opponents fixed at x.
void block_matrices(const Game& g, std::size_t i, std::size_t j, const MixedProfile& x,
                    std::vector<double>& n, std::vector<double>& d) {
  const std::size_t rows = g.num_actions(i), cols = g.num_actions(j);
  n.assign(rows * cols, 0.0);
  d.assign(rows * cols, 0.0);
  MixedProfile y = x;
  for (std::size_t b = 0; b < cols; ++b) {
    std::fill(y[j].begin(), y[j].end(), 0.0);
    y[j][b] = 1.0;
    const auto per = contract_unilateral(g, i, y);
    for (std::size_t a = 0; a < rows; ++a) {
      d[a * cols + b] = per[a].p;
      n[a * cols + b] = std::min(per[a].pr[i], per[a].p);
    }
  }
}

MixedProfile with_uniform(const Game& g, std::size_t i, MixedProfile x) {
  x[i].assign(g.num_actions(i), 1.0 / static_cast<double>(g.num_actions(i)));
  return x;
}

MinmaxEntry minmax_two_player(const Game& g, std::size_t i, const MinmaxOptions& opt) {
  const std::size_t j = 1 - i;
  MixedProfile x = uniform_profile(g, {{0}, {0}});
  std::vector<double> n, d;
  block_matrices(g, i, j, x, n, d);
  const RatioMinmax r = minimize_ratio(n, d, g.num_actions(i), g.num_actions(j), opt.tol_v);
  x[j] = r.col;
  MinmaxEntry e;
  e.punish = with_uniform(g, i, x);
  e.value = best_reply_value(g, i, e.punish);
  e.lower = std::min(r.lower, e.value);
  e.certified = true;
  e.iterations = r.iterations;
  e.residual = e.value - e.lower;
  return e;
}

MinmaxEntry minmax_multi(const Game& g, std::size_t i, const MinmaxOptions& opt) {
  const std::size_t n = g.num_players();
  std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + i);
  std::gamma_distribution<double> gamma(1.0, 1.0);

  std::vector<MixedProfile> starts;
  std::vector<std::vector<int>> uniform_support(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (int a = 0; a < static_cast<int>(g.num_actions(j)); ++a) uniform_support[j].push_back(a);
  }
  starts.push_back(uniform_profile(g, uniform_support));
  // Pure opponent profiles are cheap and often optimal.
  const std::size_t pure_count = g.num_profiles() / g.num_actions(i);
  if (pure_count <= opt.restarts) {
    for (std::size_t idx = 0; idx < g.num_profiles(); ++idx) {
      const Profile a = g.profile(idx);
      if (a[i] != 0) continue;
      starts.push_back(pure_profile(g, a));
    }
  }
  for (std::size_t s = 0; s < opt.restarts; ++s) {
    MixedProfile x = starts.front();
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (double& v : x[j]) sum += (v = gamma(rng));
      for (double& v : x[j]) v /= sum;
    }
    starts.push_back(std::move(x));
  }

  MinmaxEntry best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<double> nm, dm;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    MixedProfile x = with_uniform(g, i, starts[s]);
    double cur = best_reply_value(g, i, x);
    int sweeps = 0;
    for (; sweeps < 200; ++sweeps) {
      const double before = cur;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        block_matrices(g, i, j, x, nm, dm);
        const RatioMinmax r =
            minimize_ratio(nm, dm, g.num_actions(i), g.num_actions(j), opt.tol_v);
        if (r.value < cur) {
          x[j] = r.col;
          cur = best_reply_value(g, i, x);
        }
      }
      if (before - cur < 1e-12) break;
    }
    if (cur < best.value - 1e-15) {
      best.value = cur;
      best.punish = x;
      best.iterations = sweeps + 1;
    }
    if (best.value == 0.0) break;
  }
  best.restarts = static_cast<int>(starts.size());
  best.lower = 0.0;
  best.certified = best.value == 0.0;
  best.residual = best.value - best.lower;
  return best;
}

}  // namespace

MinmaxEntry minmax(const Game& g, std::size_t i, const MinmaxOptions& opt) {
  if (i >= g.num_players()) throw Error(ErrorCode::InvalidArgument, "player index out of range");
  if (g.num_players() == 2) return minmax_two_player(g, i, opt);
  return minmax_multi(g, i, opt);
}

MinmaxResult minmax_all(const Game& g, const MinmaxOptions& opt) {
  MinmaxResult res;
  for (std::size_t i = 0; i < g.num_players(); ++i) res.players.push_back(minmax(g, i, opt));
  return res;
}

double discounted_value(const Game& g, std::size_t i, double lambda) {
  if (g.num_players() != 2) {
    throw Error(ErrorCode::InvalidArgument, "discounted value needs a two-player game");
  }
  const std::size_t j = 1 - i;
  const std::size_t rows = g.num_actions(i), cols = g.num_actions(j);
  std::vector<double> pr(rows * cols), p(rows * cols), m(rows * cols);
  for (std::size_t idx = 0; idx < g.num_profiles(); ++idx) {
    const Profile a = g.profile(idx);
    const std::size_t k = static_cast<std::size_t>(a[i]) * cols + static_cast<std::size_t>(a[j]);
    p[k] = g.p(idx);
    pr[k] = g.absorbing(idx) ? g.p(idx) * g.r(idx, i) : 0.0;
  }
  // The operator is a (1 - lambda)-contraction, so T(v) - v is decreasing.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = pr[k] + (1.0 - p[k]) * mid;
    const double t = (1.0 - lambda) * solve_matrix_game(m, rows, cols).value;
    if (t > mid) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<DiscountedCheck> discounted_cross_check(const Game& g, std::size_t i) {
  if (g.num_players() != 2) return std::nullopt;
  DiscountedCheck c;
  c.lambdas = {1e-2, 1e-3, 1e-4};
  for (double l : c.lambdas) c.values.push_back(discounted_value(g, i, l));
  c.extrapolated = (10.0 * c.values[2] - c.values[1]) / 9.0;
  return c;
}

}  // namespace absorbing
