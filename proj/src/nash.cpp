#include "absorbing/nash.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "absorbing/errors.hpp"
#include "absorbing/lp.hpp"

namespace absorbing {
namespace {

// Dense payoff table u[idx * n + i].
std::vector<double> payoff_table(const Game& g, std::span<const double> w) {
  const std::size_t n = g.num_players();
  std::vector<double> u(g.num_profiles() * n);
  for (std::size_t idx = 0; idx < g.num_profiles(); ++idx) {
    const double p = g.p(idx);
    for (std::size_t i = 0; i < n; ++i) {
      u[idx * n + i] = (p > 0.0 ? p * g.r(idx, i) : 0.0) + (1.0 - p) * w[i];
    }
  }
  return u;
}

// Expected payoff of player i when player i plays a_i and player j (if
// j != n) plays b_j, everyone else following x.
double partial_payoff(const Game& g, const std::vector<double>& u, const MixedProfile& x,
                      std::size_t i, int a_i, std::size_t j, int b_j) {
  const std::size_t n = g.num_players();
  double total = 0.0;
  for (std::size_t idx = 0; idx < g.num_profiles(); ++idx) {
    const Profile a = g.profile(idx);
    if (a[i] != a_i) continue;
    if (j < n && a[j] != b_j) continue;
    double wgt = 1.0;
    for (std::size_t k = 0; k < n && wgt != 0.0; ++k) {
      if (k == i || k == j) continue;
      wgt *= x[k][static_cast<std::size_t>(a[k])];
    }
    total += wgt * u[idx * n + i];
  }
  return total;
}

bool accept(const Game& g, std::span<const double> w, const MixedProfile& x,
            const NashOptions& opt, double& regret) {
  for (std::size_t i = 0; i < x.num_players(); ++i) {
    for (double v : x[i]) {
      if (!(v >= 0.0) || !std::isfinite(v)) return false;
    }
  }
  regret = nash_regret(g, w, x);
  if (!(regret <= opt.eps_nash)) return false;
  if (opt.min_absorption >= 0.0 && !(absorb_prob_mixed(g, x) > opt.min_absorption)) return false;
  return true;
}

// Clips tiny negatives and renormalizes; false if anything is clearly negative.
bool project(MixedProfile& x) {
  for (std::size_t i = 0; i < x.num_players(); ++i) {
    double sum = 0.0;
    for (double& v : x[i]) {
      if (v < -1e-9) return false;
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (!(sum > 0.0)) return false;
    for (double& v : x[i]) v /= sum;
  }
  return true;
}

std::vector<std::vector<int>> subsets(std::size_t k) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> s;
    for (std::size_t a = 0; a < k; ++a) {
      if (mask & (1u << a)) s.push_back(static_cast<int>(a));
    }
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

std::optional<NashResult> pure_equilibrium(const Game& g, std::span<const double> w,
                                           const NashOptions& opt) {
  for (std::size_t idx = 0; idx < g.num_profiles(); ++idx) {
    const MixedProfile x = pure_profile(g, g.profile(idx));
    double regret = 0.0;
    if (accept(g, w, x, opt, regret)) return NashResult{x, regret, "pure"};
  }
  return std::nullopt;
}

// A mixture of `other` on s_other against which every action in s_me is a
// best reply of `me`: the matrix game over rows (a, a') with entries
// u(a') - u(a) has value <= 0 exactly when one exists.
std::optional<std::vector<double>> supporting_mixture(const Game& g, const std::vector<double>& u,
                                                      std::size_t me, std::size_t other,
                                                      const std::vector<int>& s_me,
                                                      const std::vector<int>& s_other) {
  const std::size_t n = g.num_players();
  const std::size_t all = g.num_actions(me);
  const std::size_t rows = s_me.size() * all, cols = s_other.size();
  std::vector<double> m(rows * cols);
  Profile a(2), b(2);
  for (std::size_t r = 0; r < s_me.size(); ++r) {
    for (std::size_t alt = 0; alt < all; ++alt) {
      for (std::size_t c = 0; c < cols; ++c) {
        a[me] = s_me[r];
        a[other] = s_other[c];
        b[me] = static_cast<int>(alt);
        b[other] = s_other[c];
        m[(r * all + alt) * cols + c] = u[g.index(b) * n + me] - u[g.index(a) * n + me];
      }
    }
  }
  const MatrixGameSolution sol = solve_matrix_game(m, rows, cols);
  if (sol.value > 1e-12) return std::nullopt;
  std::vector<double> x(g.num_actions(other), 0.0);
  for (std::size_t c = 0; c < cols; ++c) x[static_cast<std::size_t>(s_other[c])] = sol.col[c];
  return x;
}

std::optional<NashResult> support_enumeration_2p(const Game& g, std::span<const double> w,
                                                 const NashOptions& opt) {
  const auto u = payoff_table(g, w);
  const auto s0 = subsets(g.num_actions(0));
  const auto s1 = subsets(g.num_actions(1));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < s0.size(); ++i) {
    for (std::size_t j = 0; j < s1.size(); ++j) pairs.emplace_back(i, j);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& l, const auto& r) {
    return s0[l.first].size() + s1[l.second].size() < s0[r.first].size() + s1[r.second].size();
  });
  for (const auto& [i, j] : pairs) {
    auto x1 = supporting_mixture(g, u, 0, 1, s0[i], s1[j]);
    if (!x1) continue;
    auto x0 = supporting_mixture(g, u, 1, 0, s1[j], s0[i]);
    if (!x0) continue;
    MixedProfile x({*x0, *x1});
    if (!project(x)) continue;
    double regret = 0.0;
    if (accept(g, w, x, opt, regret)) return NashResult{x, regret, "support-enumeration"};
  }
  return std::nullopt;
}

// Newton iteration on the indifference system for a fixed support profile.
std::optional<MixedProfile> newton_on_support(const Game& g, const std::vector<double>& u,
                                              const std::vector<std::vector<int>>& supp,
                                              MixedProfile x) {
  const std::size_t n = g.num_players();
  std::vector<std::size_t> off(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) off[i + 1] = off[i] + supp[i].size() + 1;
  const std::size_t dim = off[n];
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = partial_payoff(g, u, x, i, supp[i][0], n, 0);
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(dim));
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < supp[i].size(); ++r) {
        const auto row = static_cast<Eigen::Index>(off[i] + r);
        f(row) = partial_payoff(g, u, x, i, supp[i][r], n, 0) - v[i];
        jac(row, static_cast<Eigen::Index>(off[i] + supp[i].size())) = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          for (std::size_t c = 0; c < supp[j].size(); ++c) {
            jac(row, static_cast<Eigen::Index>(off[j] + c)) =
                partial_payoff(g, u, x, i, supp[i][r], j, supp[j][c]);
          }
        }
      }
      const auto row = static_cast<Eigen::Index>(off[i] + supp[i].size());
      double sum = 0.0;
      for (std::size_t c = 0; c < supp[i].size(); ++c) {
        sum += x[i][static_cast<std::size_t>(supp[i][c])];
        jac(row, static_cast<Eigen::Index>(off[i] + c)) = 1.0;
      }
      f(row) = sum - 1.0;
    }
    if (f.cwiseAbs().maxCoeff() < 1e-13) return x;
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < supp[i].size(); ++c) {
        x[i][static_cast<std::size_t>(supp[i][c])] += step(static_cast<Eigen::Index>(off[i] + c));
      }
      v[i] += step(static_cast<Eigen::Index>(off[i] + supp[i].size()));
    }
    if (step.cwiseAbs().maxCoeff() < 1e-15) return x;
  }
  return x;
}

std::optional<NashResult> regret_matching(const Game& g, std::span<const double> w,
                                          const NashOptions& opt) {
  const std::size_t n = g.num_players();
  const auto u = payoff_table(g, w);
  std::vector<std::vector<double>> regret(n), avg(n);
  for (std::size_t i = 0; i < n; ++i) {
    regret[i].assign(g.num_actions(i), 0.0);
    avg[i].assign(g.num_actions(i), 0.0);
  }
  std::vector<std::vector<double>> cur(n);
  for (std::size_t i = 0; i < n; ++i) cur[i].assign(g.num_actions(i), 1.0 / g.num_actions(i));
  for (std::size_t t = 0; t < opt.regret_iterations; ++t) {
    const MixedProfile x(cur);
    for (std::size_t i = 0; i < n; ++i) {
      double base = 0.0;
      std::vector<double> val(g.num_actions(i));
      for (std::size_t a = 0; a < g.num_actions(i); ++a) {
        val[a] = partial_payoff(g, u, x, i, static_cast<int>(a), n, 0);
        base += x[i][a] * val[a];
      }
      for (std::size_t a = 0; a < g.num_actions(i); ++a) regret[i][a] += val[a] - base;
      for (std::size_t a = 0; a < g.num_actions(i); ++a) avg[i][a] += x[i][a];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double pos = 0.0;
      for (double r : regret[i]) pos += std::max(0.0, r);
      for (std::size_t a = 0; a < g.num_actions(i); ++a) {
        cur[i][a] = pos > 0.0 ? std::max(0.0, regret[i][a]) / pos : 1.0 / g.num_actions(i);
      }
    }
  }
  for (auto& ai : avg) {
    double s = 0.0;
    for (double v : ai) s += v;
    for (double& v : ai) v /= s;
  }
  MixedProfile x(avg);
  double r = 0.0;
  if (accept(g, w, x, opt, r)) return NashResult{x, r, "regret-matching"};
  // Polish on the empirical support.
  std::vector<std::vector<int>> supp(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < x[i].size(); ++a) {
      if (x[i][a] > 1e-3) supp[i].push_back(static_cast<int>(a));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> y(x[i].size(), 0.0);
    for (int a : supp[i]) y[static_cast<std::size_t>(a)] = x[i][static_cast<std::size_t>(a)];
    x[i] = y;
  }
  if (project(x)) {
    if (auto y = newton_on_support(g, u, supp, x)) {
      if (project(*y) && accept(g, w, *y, opt, r)) return NashResult{*y, r, "regret-matching"};
    }
  }
  return std::nullopt;
}

std::optional<NashResult> support_enumeration_newton(const Game& g, std::span<const double> w,
                                                     const NashOptions& opt) {
  const std::size_t n = g.num_players();
  const auto u = payoff_table(g, w);
  std::vector<std::vector<std::vector<int>>> per(n);
  for (std::size_t i = 0; i < n; ++i) per[i] = subsets(g.num_actions(i));
  std::vector<std::vector<std::size_t>> combos;
  std::vector<std::size_t> pos(n, 0);
  while (true) {
    combos.push_back(pos);
    std::size_t i = n;
    bool done = true;
    while (i-- > 0) {
      if (++pos[i] < per[i].size()) {
        done = false;
        break;
      }
      pos[i] = 0;
    }
    if (done) break;
  }
  auto total = [&](const std::vector<std::size_t>& c) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += per[i][c[i]].size();
    return s;
  };
  std::stable_sort(combos.begin(), combos.end(),
                   [&](const auto& a, const auto& b) { return total(a) < total(b); });
  std::mt19937_64 rng(opt.seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (const auto& c : combos) {
    std::vector<std::vector<int>> supp(n);
    for (std::size_t i = 0; i < n; ++i) supp[i] = per[i][c[i]];
    for (std::size_t s = 0; s < opt.newton_starts; ++s) {
      std::vector<std::vector<double>> x0(n);
      for (std::size_t i = 0; i < n; ++i) {
        x0[i].assign(g.num_actions(i), 0.0);
        double sum = 0.0;
        for (int a : supp[i]) sum += (x0[i][static_cast<std::size_t>(a)] = s == 0 ? 1.0 : gamma(rng));
        for (double& v : x0[i]) v /= sum;
      }
      auto y = newton_on_support(g, u, supp, MixedProfile(x0));
      if (!y || !project(*y)) continue;
      double r = 0.0;
      if (accept(g, w, *y, opt, r)) return NashResult{*y, r, "newton"};
    }
  }
  return std::nullopt;
}

}  // namespace

double nash_regret(const Game& g, std::span<const double> w, const MixedProfile& x) {
  const std::size_t n = g.num_players();
  const PayoffVector base = one_shot_payoff(g, w, x);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto per = contract_unilateral(g, i, x);
    for (const auto& c : per) {
      const double val = c.pr[i] + (1.0 - c.p) * w[i];
      worst = std::max(worst, val - base[i]);
    }
  }
  return worst;
}

NashResult solve_one_shot_nash(const Game& g, std::span<const double> w, const NashOptions& opt) {
  if (w.size() != g.num_players()) throw Error(ErrorCode::InvalidArgument, "w has wrong length");
  if (auto r = pure_equilibrium(g, w, opt)) return *r;
  if (g.num_players() == 2) {
    if (auto r = support_enumeration_2p(g, w, opt)) return *r;
  } else {
    if (auto r = regret_matching(g, w, opt)) return *r;
    if (auto r = support_enumeration_newton(g, w, opt)) return *r;
  }
  throw Error(ErrorCode::NashNotFound, "no equilibrium of the one-shot game met the tolerance");
}

}  // namespace absorbing
