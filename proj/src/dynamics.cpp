#include "absorbing/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absorbing/errors.hpp"
#include "absorbing/nash.hpp"

namespace absorbing {

Rho rho(const Game& g, const MixedProfile& x) {
  if (absorb_prob_mixed(g, x) > 0.0) {
    throw Error(ErrorCode::AbsorbingProfile, "rho is defined on nonabsorbing profiles only");
  }
  Rho r;
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    const BestReply br = best_reply(g, i, x);
    r.value.push_back(br.rho);
    r.action.push_back(br.action);
  }
  return r;
}

double slack(std::span<const double> w, const Rho& r) {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (r.finite(i)) s = std::min(s, w[i] - r.value[i]);
  }
  return s;
}

namespace {

void compositions(int total, std::size_t parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    cur.push_back(first);
    compositions(total - first, parts - 1, cur, out);
    cur.pop_back();
  }
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
  return r;
}

}  // namespace

SearchGrid SearchGrid::build(const Game& g, const AbsorptionStructure& st, double mesh,
                             std::size_t max_points_per_block) {
  if (!(mesh > 0.0 && mesh <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mesh must lie in (0, 1]");
  SearchGrid grid;
  grid.n_ = g.num_players();
  grid.mesh_ = mesh;
  for (std::size_t i = 0; i < grid.n_; ++i) grid.actions_.push_back(g.num_actions(i));
  const int base_steps = std::max(1, static_cast<int>(std::lround(1.0 / mesh)));
  std::map<Support, std::uint32_t> support_index;

  for (std::size_t l = 0; l < st.components.size(); ++l) {
    for (Support& s : maximal_supports(g, st, l)) {
      Block b;
      b.component = l;
      b.support = std::move(s);
      int steps = base_steps;
      auto count_for = [&](int m) {
        double c = 1.0;
        for (const auto& si : b.support) {
          c *= binomial(static_cast<std::size_t>(m) + si.size() - 1, si.size() - 1);
        }
        return c;
      };
      while (steps > 1 && count_for(steps) > static_cast<double>(max_points_per_block)) --steps;
      b.steps = steps;
      b.comps.resize(grid.n_);
      b.moves.resize(grid.n_);
      b.count = 1;
      for (std::size_t i = 0; i < grid.n_; ++i) {
        std::vector<int> cur;
        compositions(steps, b.support[i].size(), cur, b.comps[i]);
        std::map<std::vector<int>, std::size_t> where;
        for (std::size_t c = 0; c < b.comps[i].size(); ++c) where[b.comps[i][c]] = c;
        b.moves[i].resize(b.comps[i].size());
        for (std::size_t c = 0; c < b.comps[i].size(); ++c) {
          const auto& comp = b.comps[i][c];
          for (std::size_t from = 0; from < comp.size(); ++from) {
            if (comp[from] == 0) continue;
            for (std::size_t to = 0; to < comp.size(); ++to) {
              if (to == from) continue;
              auto next = comp;
              --next[from];
              ++next[to];
              b.moves[i][c].push_back(where.at(next));
            }
          }
        }
        b.count *= b.comps[i].size();
      }
      b.offset = grid.support_id_.size();
      grid.blocks_.push_back(std::move(b));
      const Block& blk = grid.blocks_.back();
      for (std::size_t local = 0; local < blk.count; ++local) {
        const std::size_t k = blk.offset + local;
        grid.support_id_.push_back(0);
        const MixedProfile x = grid.point(k);
        Support actual(grid.n_);
        for (std::size_t i = 0; i < grid.n_; ++i) actual[i] = x.support(i);
        auto it = support_index.find(actual);
        if (it == support_index.end()) {
          const auto id = static_cast<std::uint32_t>(grid.supports_.size());
          it = support_index.emplace(actual, id).first;
          grid.supports_.push_back(actual);
          grid.exits_.push_back(exits_at_support(g, actual));
          bool joint = false;
          for (const Exit& e : grid.exits_.back()) joint = joint || e.joint();
          grid.joint_.push_back(joint);
        }
        grid.support_id_.back() = it->second;
        const Rho r = absorbing::rho(g, x);
        for (std::size_t i = 0; i < grid.n_; ++i) {
          grid.rho_.push_back(r.value[i]);
          grid.act_.push_back(r.action[i]);
        }
      }
    }
  }
  return grid;
}

std::size_t SearchGrid::block_of(std::size_t k) const {
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), k,
                             [](std::size_t v, const Block& b) { return v < b.offset; });
  return static_cast<std::size_t>(it - blocks_.begin()) - 1;
}

std::vector<std::size_t> SearchGrid::digits(const Block& b, std::size_t local) const {
  std::vector<std::size_t> d(n_);
  for (std::size_t i = n_; i-- > 0;) {
    d[i] = local % b.comps[i].size();
    local /= b.comps[i].size();
  }
  return d;
}

MixedProfile SearchGrid::point(std::size_t k) const {
  const Block& b = blocks_[block_of(k)];
  const auto d = digits(b, k - b.offset);
  std::vector<std::vector<double>> x(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    x[i].assign(actions_[i], 0.0);
    const auto& comp = b.comps[i][d[i]];
    for (std::size_t a = 0; a < comp.size(); ++a) {
      x[i][static_cast<std::size_t>(b.support[i][a])] =
          static_cast<double>(comp[a]) / static_cast<double>(b.steps);
    }
  }
  return MixedProfile(std::move(x));
}

Rho SearchGrid::rho_at(std::size_t k) const {
  Rho r;
  for (std::size_t i = 0; i < n_; ++i) {
    r.value.push_back(rho(k, i));
    r.action.push_back(rho_action(k, i));
  }
  return r;
}

std::vector<std::size_t> SearchGrid::neighbors(std::size_t k) const {
  const Block& b = blocks_[block_of(k)];
  auto d = digits(b, k - b.offset);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t own = d[i];
    for (std::size_t next : b.moves[i][own]) {
      d[i] = next;
      std::size_t local = 0;
      for (std::size_t j = 0; j < n_; ++j) local = local * b.comps[j].size() + d[j];
      out.push_back(b.offset + local);
    }
    d[i] = own;
  }
  return out;
}

MixedProfile exit_profile(const Game& g, const MixedProfile& x, const Exit& e) {
  MixedProfile y = x;
  for (std::size_t k = 0; k < e.coalition.size(); ++k) {
    const auto i = static_cast<std::size_t>(e.coalition[k]);
    y[i].assign(g.num_actions(i), 0.0);
    y[i][static_cast<std::size_t>(e.actions[k])] = 1.0;
  }
  return y;
}

bool dominates_rho(const PayoffVector& payoff, const Rho& r) {
  for (std::size_t i = 0; i < payoff.size(); ++i) {
    if (r.finite(i) && payoff[i] < r.value[i] - 1e-12) return false;
  }
  return true;
}

std::optional<ShortCircuit> lemma_multi_check(const Game& g, const SearchGrid& grid) {
  std::optional<ShortCircuit> best;
  double best_min = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.has_joint_exit(k)) continue;
    const MixedProfile x = grid.point(k);
    const Rho r = grid.rho_at(k);
    for (const Exit& e : grid.exits(k)) {
      if (!e.joint()) continue;
      const PayoffVector pay = absorb_payoff_mixed(g, exit_profile(g, x, e));
      if (!dominates_rho(pay, r)) continue;
      // Prefer the certificate whose worst-off player does best.
      const double m = *std::min_element(pay.begin(), pay.end());
      if (m > best_min + 1e-12) {
        best_min = m;
        best = ShortCircuit{x, e, pay, r, k};
      }
    }
  }
  return best;
}

std::string case_name(Case c) {
  switch (c) {
    case Case::W: return "W";
    case Case::WH: return "WH";
    case Case::WL: return "WL";
  }
  return "?";
}

namespace {

MixedProfile blend(const MixedProfile& a, const MixedProfile& b, double t) {
  MixedProfile x = a;
  for (std::size_t i = 0; i < x.num_players(); ++i) {
    for (std::size_t k = 0; k < x[i].size(); ++k) x[i][k] = (1.0 - t) * a[i][k] + t * b[i][k];
  }
  return x;
}

int equality_player(std::span<const double> w, const Rho& r, double tol) {
  int best = -1;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!r.finite(i)) continue;
    const double d = std::abs(w[i] - r.value[i]);
    if (d <= tol && d < gap) {
      gap = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Locates s = 0 strictly inside the segment from x (s < 0) to y (s > 0).
// rho is continuous on the open segment, so bisection converges unless the
// sign change is a jump at an endpoint.
std::optional<std::pair<MixedProfile, Rho>> bisect_edge(const Game& g, std::span<const double> w,
                                                        const MixedProfile& x,
                                                        const MixedProfile& y) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    MixedProfile z = blend(x, y, mid);
    Rho r = rho(g, z);
    const double s = slack(w, r);
    if (std::abs(s) <= 1e-10) return std::make_pair(std::move(z), std::move(r));
    if (s < 0.0) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-15) break;
  }
  const double mid = 0.5 * (lo + hi);
  MixedProfile z = blend(x, y, mid);
  Rho r = rho(g, z);
  if (std::abs(slack(w, r)) <= 1e-8) return std::make_pair(std::move(z), std::move(r));
  return std::nullopt;
}

}  // namespace

Classification classify(const Game& g, const SearchGrid& grid, std::span<const double> w,
                        const ClassifyOptions& opt) {
  Classification c;
  c.w.assign(w.begin(), w.end());
  const std::size_t n = g.num_players();
  const std::size_t size = grid.size();
  std::vector<double> s(size);
  c.s_star = -std::numeric_limits<double>::infinity();
  bool any_pos = false, any_neg = false;
  for (std::size_t k = 0; k < size; ++k) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid.rho(k, i);
      if (r != kNoAbsorbingReply) v = std::min(v, w[i] - r);
    }
    s[k] = v;
    c.s_star = std::max(c.s_star, v);
    any_pos = any_pos || v > opt.tol_class;
    any_neg = any_neg || v < -opt.tol_class;
  }

  // W: a grid point on the boundary of W_H(x) ...
  for (std::size_t k = 0; k < size; ++k) {
    if (std::abs(s[k]) <= opt.tol_class) {
      c.tag = Case::W;
      c.x = grid.point(k);
      c.rho = grid.rho_at(k);
      c.i0 = equality_player(w, c.rho, opt.tol_class);
      c.grid_index = k;
      return c;
    }
  }
  // ... or a sign change of the slack along a grid edge.
  if (any_pos && any_neg) {
    int attempts = 0;
    for (std::size_t k = 0; k < size && attempts < 4000; ++k) {
      if (!(s[k] < 0.0)) continue;
      for (std::size_t nb : grid.neighbors(k)) {
        if (!(s[nb] > 0.0)) continue;
        ++attempts;
        auto hit = bisect_edge(g, w, grid.point(k), grid.point(nb));
        if (!hit) continue;
        c.tag = Case::W;
        c.x = std::move(hit->first);
        c.rho = std::move(hit->second);
        c.i0 = equality_player(w, c.rho, 1e-8);
        c.refined = true;
        c.grid_index = k;
        return c;
      }
    }
  }

  if (any_pos) {
    // W_H \ W: a point strictly below w that has a joint exit.
    // Exits are ranked: one with e_i0 < rho_i0 - epsilon, then one with
    // e_i0 < rho_i0, then one dominating rho (there alpha reaches 1).
    double best_alpha = -1.0;
    int best_rank = -1;
    for (std::size_t k = 0; k < size; ++k) {
      if (!(s[k] > opt.tol_class) || !grid.has_joint_exit(k)) continue;
      const MixedProfile x = grid.point(k);
      const Rho r = grid.rho_at(k);
      for (const Exit& e : grid.exits(k)) {
        if (!e.joint()) continue;
        const PayoffVector pay = absorb_payoff_mixed(g, exit_profile(g, x, e));
        int i0 = -1;
        int rank = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!r.finite(i) || !(pay[i] < r.value[i])) continue;
          const int ri = pay[i] < r.value[i] - opt.epsilon ? 2 : 1;
          if (ri > rank) {
            i0 = static_cast<int>(i);
            rank = ri;
          }
        }
        double alpha = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!r.finite(i) || !(w[i] > pay[i])) continue;
          alpha = std::min(alpha, (w[i] - r.value[i]) / (w[i] - pay[i]));
        }
        if (rank > best_rank || (rank == best_rank && alpha > best_alpha + 1e-15)) {
          best_alpha = alpha;
          best_rank = rank;
          c.tag = Case::WH;
          c.x = x;
          c.rho = r;
          c.i0 = i0;
          c.exit = e;
          c.exit_payoff = pay;
          c.margin = rank == 2;
          c.grid_index = k;
        }
      }
    }
    if (c.exit) return c;
    throw Error(ErrorCode::WitnessNotFound,
                "w lies strictly above rho on the grid but no such point has a joint exit; "
                "refine the mesh");
  }

  NashOptions nopt;
  nopt.eps_nash = opt.eps_nash;
  nopt.seed = opt.seed;
  nopt.min_absorption = opt.tol_class;
  const NashResult ne = solve_one_shot_nash(g, w, nopt);
  c.tag = Case::WL;
  c.x = ne.x;
  c.nash_regret = ne.regret;
  return c;
}

DynamicsStep step_f(const Game& g, const Classification& cls, double epsilon,
                    std::span<const double> v, double tol_class) {
  const std::size_t n = g.num_players();
  DynamicsStep st;
  st.w = cls.w;
  st.cls = cls;
  st.f.assign(n, 0.0);
  const auto& w = cls.w;
  switch (cls.tag) {
    case Case::W: {
      if (cls.i0 < 0 || !cls.rho.finite(static_cast<std::size_t>(cls.i0))) {
        throw Error(ErrorCode::InvalidWitness, "W witness lacks an equality player");
      }
      const auto i0 = static_cast<std::size_t>(cls.i0);
      MixedProfile y = cls.x;
      y[i0].assign(g.num_actions(i0), 0.0);
      y[i0][static_cast<std::size_t>(cls.rho.action[i0])] = 1.0;
      const Contraction c = contract(g, y);
      st.q = c.p;
      st.mu = epsilon * c.p;
      for (std::size_t i = 0; i < n; ++i) st.f[i] = epsilon * c.pr[i] + (1.0 - st.mu) * w[i];
      break;
    }
    case Case::WH: {
      const auto& e = cls.exit_payoff;
      double alpha = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!cls.rho.finite(i) || !(w[i] > e[i])) continue;
        const double a = (w[i] - cls.rho.value[i]) / (w[i] - e[i]);
        if (a < alpha) {
          alpha = a;
          st.alpha_player = static_cast<int>(i);
        }
      }
      // alpha = 1 only when the exit payoff dominates rho(x).
      if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidWitness, "alpha outside (0, 1]");
      }
      st.alpha = alpha;
      st.mu = alpha;
      for (std::size_t i = 0; i < n; ++i) st.f[i] = alpha * e[i] + (1.0 - alpha) * w[i];
      break;
    }
    case Case::WL: {
      st.f = one_shot_payoff(g, w, cls.x);
      st.mu = absorb_prob_mixed(g, cls.x);
      break;
    }
  }
  if (!(st.mu > 0.0) || st.mu > 1.0 + 1e-12) {
    throw Error(ErrorCode::InvalidWitness, "mu outside (0, 1]");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (st.f[i] < v[i] - epsilon - tol_class || st.f[i] > 1.0 + tol_class) {
      throw Error(ErrorCode::InvalidWitness, "f(w) left Y");
    }
  }
  return st;
}

}  // namespace absorbing
