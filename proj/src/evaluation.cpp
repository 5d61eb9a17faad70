#include "absorbing/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "absorbing/config.hpp"
#include "absorbing/errors.hpp"
#include "absorbing/game_io.hpp"

namespace absorbing {

namespace {

PayoffVector conditional_payoff(const Game& g, const MixedProfile& x) {
  const Contraction c = contract(g, x);
  PayoffVector r(g.num_players(), 0.0);
  if (c.p > 0.0) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = c.pr[i] / c.p;
  }
  return r;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> cumulative(std::span<const double> x) {
  std::vector<double> c(x.size());
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) c[a] = (s += x[a]);
  c.back() = 1.0;
  return c;
}

int draw(const std::vector<double>& cum, double u) {
  std::size_t a = 0;
  while (a + 1 < cum.size() && !(u < cum[a])) ++a;
  return static_cast<int>(a);
}

// Welford accumulator.
struct Moments {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double se() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double t = n + o.n, d = o.mean - mean;
    mean += d * o.n / t;
    m2 += o.m2 + d * d * n * o.n / t;
    n = t;
  }
};

// Episodes are accumulated per fixed-size chunk and the chunks merged in
// index order, so results do not depend on the worker count.
constexpr std::size_t kChunk = 1024;

struct ChunkMoments {
  std::vector<Moments> pay;
  Moments detected, absorbed, stages;
};

double survive(double p, double stages) { return std::exp(stages * std::log1p(-p)); }

}  // namespace

EvalReport exact_eval(const Game& g, const StrategySpec& spec, const Orbit* orbit) {
  const std::size_t k0 = spec.blocks.size();
  const std::size_t n = g.num_players();
  EvalReport r;
  r.Z.assign(k0 + 1, PayoffVector(n, 0.0));
  r.Z[k0] = conditional_payoff(g, spec.tail);
  for (std::size_t k = k0; k-- > 0;) {
    const BlockSpec& b = spec.blocks[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = b.payoff.empty() ? 0.0 : b.payoff[i];
      r.Z[k][i] = b.mass * ri + (1.0 - b.mass) * r.Z[k + 1][i];
    }
  }
  r.gamma = r.Z[0];
  double alive = 1.0;
  for (const auto& b : spec.blocks) {
    r.masses.push_back(b.mass);
    r.eta.push_back(b.tested ? b.eta : 0.0);
    alive *= 1.0 - b.mass;
    if (b.tested) r.detection_bound += b.eta * static_cast<double>(n);
  }
  r.total_absorption = 1.0 - alive;
  r.distance_to_target = sup_distance(r.gamma, spec.target);
  if (orbit != nullptr && orbit->w.size() == k0 + 1) {
    for (std::size_t k = 0; k < k0; ++k) {
      const BlockSpec& b = spec.blocks[k];
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ri = b.payoff.empty() ? 0.0 : b.payoff[i];
        const double step = b.mass * ri + (1.0 - b.mass) * orbit->w[k + 1][i];
        d = std::max(d, std::abs(step - orbit->w[k][i]));
      }
      r.ledger.push_back(d);
    }
  }
  return r;
}

SimReport simulate(const Game& g, const StrategySpec& spec, std::size_t episodes,
                   std::uint64_t seed, const Deviation* dev) {
  if (episodes == 0) throw Error(ErrorCode::InvalidArgument, "episodes must be positive");
  const std::size_t n = g.num_players();
  const std::size_t k0 = spec.blocks.size();
  std::vector<std::vector<std::vector<double>>> cum(k0);
  for (std::size_t k = 0; k < k0; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool replaced = dev != nullptr && dev->player == i && k < dev->per_block.size() &&
                            !dev->per_block[k].empty();
      cum[k].push_back(cumulative(replaced ? std::span<const double>(dev->per_block[k])
                                           : std::span<const double>(spec.blocks[k].y[i])));
    }
  }
  const PayoffVector tail = conditional_payoff(g, spec.tail);
  std::vector<PayoffVector> punished(n);
  for (std::size_t j = 0; j < n; ++j) {
    punished[j] = conditional_payoff(g, spec.punish[j]);
    if (dev != nullptr) {
      punished[j][dev->player] = j == dev->player
                                     ? spec.punish_value[j]
                                     : best_reply_value(g, dev->player, spec.punish[j]);
    }
  }

  const std::size_t chunks = (episodes + kChunk - 1) / kChunk;
  std::vector<ChunkMoments> parts(chunks);
  auto run_chunk = [&](std::size_t c) {
    ChunkMoments& cm = parts[c];
    cm.pay.assign(n, {});
    Monitor mon(spec);
    Profile a(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t end = std::min(episodes, (c + 1) * kChunk);
    for (std::size_t e = c * kChunk; e < end; ++e) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(e))));
      mon.reset();
      const PayoffVector* out = nullptr;
      PayoffVector absorbed_payoff;
      double len = 0.0;
      bool hit = false, caught = false;
      while (true) {
        if (mon.punished() >= 0) {
          out = &punished[static_cast<std::size_t>(mon.punished())];
          caught = true;
          break;
        }
        if (mon.in_tail()) {
          out = &tail;
          break;
        }
        const auto& cb = cum[mon.block()];
        for (std::size_t i = 0; i < n; ++i) a[i] = draw(cb[i], unif(rng));
        const std::size_t idx = g.index(a);
        const double p = g.p(idx);
        len += 1.0;
        if (p > 0.0 && unif(rng) < p) {
          absorbed_payoff = g.r(idx);
          out = &absorbed_payoff;
          hit = true;
          break;
        }
        mon.observe(a);
      }
      for (std::size_t i = 0; i < n; ++i) cm.pay[i].add((*out)[i]);
      cm.detected.add(caught ? 1.0 : 0.0);
      cm.absorbed.add(hit ? 1.0 : 0.0);
      cm.stages.add(len);
    }
  };
  const std::size_t nw = std::min(worker_count(), chunks);
  if (nw <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nw; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c; (c = next.fetch_add(1)) < chunks;) run_chunk(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<Moments> pay(n);
  Moments detected, absorbed, stages;
  for (const auto& cm : parts) {
    for (std::size_t i = 0; i < n; ++i) pay[i].merge(cm.pay[i]);
    detected.merge(cm.detected);
    absorbed.merge(cm.absorbed);
    stages.merge(cm.stages);
  }
  SimReport r;
  r.episodes = episodes;
  for (std::size_t i = 0; i < n; ++i) {
    r.mean.push_back(pay[i].mean);
    r.se.push_back(pay[i].se());
  }
  r.absorbed_fraction = absorbed.mean;
  r.detection_fraction = detected.mean;
  r.detection_se = detected.se();
  r.mean_stages = stages.mean;
  return r;
}

std::optional<std::uint64_t> detection_stage(const StrategySpec& spec, std::size_t block,
                                             std::size_t player, int action) {
  const BlockSpec& b = spec.blocks.at(block);
  if (!b.tested) return std::nullopt;
  const auto& y = b.y[player];
  const auto c = static_cast<std::size_t>(action);
  if (y[c] == 0.0) return 1;
  if (b.T < b.n_min) return std::nullopt;
  const double l = block_log_term(b, player);
  // The gap as the monitor computes it after n stages of constant play.
  auto violated = [&](std::uint64_t n) {
    const double nd = static_cast<double>(n);
    double gap = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) {
      gap = std::max(gap, std::abs((a == c ? nd : 0.0) - nd * y[a]));
    }
    return Monitor::frequency_violation(gap, n, l);
  };
  const std::uint64_t lo0 = std::max<std::uint64_t>(b.n_min, 1);
  if (!violated(b.T)) return std::nullopt;
  std::uint64_t lo = lo0, hi = b.T;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (violated(mid)) hi = mid;
    else lo = mid + 1;
  }
  while (lo > lo0 && violated(lo - 1)) --lo;
  return lo;
}

namespace {

double tail_value(const Game& g, const StrategySpec& spec, std::size_t i, int action) {
  if (action < 0) return conditional_payoff(g, spec.tail)[i];
  const auto u = contract_unilateral(g, i, spec.tail)[static_cast<std::size_t>(action)];
  return u.p > 0.0 ? u.pr[i] / u.p : 0.0;
}

int planned(const PurePlan& plan, std::size_t k) {
  return k < plan.block_action.size() ? plan.block_action[k] : -1;
}

}  // namespace

double plan_value(const Game& g, const StrategySpec& spec, std::size_t player,
                  const PurePlan& plan) {
  double v = tail_value(g, spec, player, plan.tail_action);
  const double punished = spec.punish_value[player];
  for (std::size_t k = spec.blocks.size(); k-- > 0;) {
    const BlockSpec& b = spec.blocks[k];
    const int c = planned(plan, k);
    if (c < 0) {
      const double ri = b.payoff.empty() ? 0.0 : b.payoff[player];
      v = b.mass * ri + (1.0 - b.mass) * v;
      continue;
    }
    const auto u = contract_unilateral(g, player, b.y)[static_cast<std::size_t>(c)];
    const double rc = u.p > 0.0 ? u.pr[player] / u.p : 0.0;
    const auto d = detection_stage(spec, k, player, c);
    const double stages = static_cast<double>(d ? std::min(*d, b.T) : b.T);
    const double s = survive(u.p, stages);
    v = (1.0 - s) * rc + s * (d ? punished : v);
  }
  return v;
}

double plan_value_bruteforce(const Game& g, const StrategySpec& spec, std::size_t player,
                             const PurePlan& plan, std::uint64_t max_stages) {
  std::uint64_t total = 0;
  for (const auto& b : spec.blocks) total += b.T;
  if (total > max_stages) throw Error(ErrorCode::InvalidArgument, "horizon too long for brute force");
  double alive = 1.0, acc = 0.0;
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const BlockSpec& b = spec.blocks[k];
    const int c = planned(plan, k);
    if (c < 0) {
      const Contraction on = contract(g, b.y);
      for (std::uint64_t t = 0; t < b.T; ++t) {
        acc += alive * on.pr[player];
        alive *= 1.0 - on.p;
      }
      continue;
    }
    const auto u = contract_unilateral(g, player, b.y)[static_cast<std::size_t>(c)];
    const auto& y = b.y[player];
    std::vector<double> counts(y.size(), 0.0);
    const double l = b.tested ? block_log_term(b, player) : 0.0;
    for (std::uint64_t t = 1; t <= b.T; ++t) {
      acc += alive * u.pr[player];
      alive *= 1.0 - u.p;
      counts[static_cast<std::size_t>(c)] += 1.0;
      bool caught = false;
      if (b.tested) {
        if (y[static_cast<std::size_t>(c)] == 0.0) {
          caught = true;
        } else if (t >= b.n_min) {
          double gap = 0.0;
          for (std::size_t a = 0; a < y.size(); ++a) {
            gap = std::max(gap, std::abs(counts[a] - static_cast<double>(t) * y[a]));
          }
          caught = Monitor::frequency_violation(gap, t, l);
        }
      }
      if (caught) return acc + alive * spec.punish_value[player];
    }
  }
  return acc + alive * tail_value(g, spec, player, plan.tail_action);
}

namespace {

std::vector<double> tilt_toward(const std::vector<double>& y, std::size_t target, double gamma) {
  std::vector<double> z(y.size());
  for (std::size_t a = 0; a < y.size(); ++a) z[a] = (1.0 - gamma) * y[a];
  z[target] += gamma;
  return z;
}

}  // namespace

DeviationReport deviation_suite(const Game& g, const StrategySpec& spec, std::size_t player,
                                const DeviationOptions& opt) {
  const std::size_t i = player;
  const std::size_t k0 = spec.blocks.size();
  const auto& names = g.actions(i);
  DeviationReport rep;
  rep.player = i;
  rep.baseline = plan_value(g, spec, i, {});

  auto add_exact = [&](const std::string& family, const std::string& label,
                       std::optional<std::size_t> block, const PurePlan& plan) {
    DeviationEntry e;
    e.family = family;
    e.label = label;
    e.block = block;
    e.payoff = plan_value(g, spec, i, plan);
    e.gain = e.payoff - rep.baseline;
    rep.entries.push_back(std::move(e));
  };
  auto add_mc = [&](const std::string& family, const std::string& label, const Deviation& d) {
    const SimReport s = simulate(g, spec, opt.episodes, opt.seed, &d);
    DeviationEntry e;
    e.family = family;
    e.label = label;
    e.payoff = s.mean[i];
    e.se = s.se[i];
    e.gain = e.payoff - rep.baseline;
    e.exact = false;
    rep.entries.push_back(std::move(e));
  };

  std::vector<std::vector<Contraction>> replies(k0);
  for (std::size_t k = 0; k < k0; ++k) replies[k] = contract_unilateral(g, i, spec.blocks[k].y);
  const auto tail_replies = contract_unilateral(g, i, spec.tail);

  if (opt.families.count("d1")) {
    for (std::size_t k = 0; k < k0; ++k) {
      const auto& y = spec.blocks[k].y[i];
      for (std::size_t c = 0; c < y.size(); ++c) {
        if (y[c] == 1.0) continue;
        PurePlan plan;
        plan.block_action.assign(k0, -1);
        plan.block_action[k] = static_cast<int>(c);
        add_exact("d1", "block " + std::to_string(k) + " plays " + names[c], k, plan);
      }
    }
    for (std::size_t c = 0; c < tail_replies.size(); ++c) {
      if (!(tail_replies[c].p > 0.0)) continue;
      PurePlan plan;
      plan.tail_action = static_cast<int>(c);
      add_exact("d1", "tail plays " + names[c], std::nullopt, plan);
    }
  }

  auto best_absorbing = [&](const std::vector<Contraction>& rs) {
    int best = -1;
    double val = -1.0;
    for (std::size_t c = 0; c < rs.size(); ++c) {
      if (!(rs[c].p > 0.0)) continue;
      const double r = rs[c].pr[i] / rs[c].p;
      if (r > val) {
        val = r;
        best = static_cast<int>(c);
      }
    }
    return best;
  };
  auto least_absorbing = [&](const std::vector<Contraction>& rs, const std::vector<double>& y) {
    int best = -1;
    for (std::size_t c = 0; c < rs.size(); ++c) {
      if (y[c] == 0.0) continue;
      if (best < 0 || rs[c].p < rs[static_cast<std::size_t>(best)].p) best = static_cast<int>(c);
    }
    return best;
  };

  if (opt.families.count("d2")) {
    PurePlan plan;
    for (std::size_t k = 0; k < k0; ++k) plan.block_action.push_back(best_absorbing(replies[k]));
    plan.tail_action = best_absorbing(tail_replies);
    add_exact("d2", "always the best absorbing reply", std::nullopt, plan);
  }
  if (opt.families.count("d3")) {
    PurePlan plan;
    for (std::size_t k = 0; k < k0; ++k) {
      plan.block_action.push_back(least_absorbing(replies[k], spec.blocks[k].y[i]));
    }
    plan.tail_action = least_absorbing(tail_replies, spec.tail[i]);
    add_exact("d3", "always the least absorbing support action", std::nullopt, plan);
  }
  if (opt.families.count("d4")) {
    for (const bool up : {true, false}) {
      Deviation d;
      d.player = i;
      d.per_block.resize(k0);
      bool any = false;
      for (std::size_t k = 0; k < k0; ++k) {
        const auto& b = spec.blocks[k];
        const auto& y = b.y[i];
        if (!b.tested || b.y.support(i).size() < 2) continue;
        int target = -1;
        for (int c : b.y.support(i)) {
          const double p = replies[k][static_cast<std::size_t>(c)].p;
          if (target < 0 || (up ? p > replies[k][static_cast<std::size_t>(target)].p
                                : p < replies[k][static_cast<std::size_t>(target)].p)) {
            target = c;
          }
        }
        d.per_block[k] = tilt_toward(y, static_cast<std::size_t>(target), opt.tilt);
        any = true;
      }
      if (any) add_mc("d4", up ? "tilt toward absorption" : "tilt away from absorption", d);
    }
  }
  if (opt.families.count("d5")) {
    for (const double factor : {2.0, 0.5}) {
      Deviation d;
      d.player = i;
      d.per_block.resize(k0);
      bool any = false;
      for (std::size_t k = 0; k < k0; ++k) {
        const auto& b = spec.blocks[k];
        if (!b.exit || (b.kind != BlockKind::Case3 && b.kind != BlockKind::Certificate)) continue;
        const auto& coal = b.exit->coalition;
        const auto it = std::find(coal.begin(), coal.end(), static_cast<int>(i));
        if (it == coal.end()) continue;
        const auto a = static_cast<std::size_t>(b.exit->actions[static_cast<std::size_t>(it - coal.begin())]);
        // Undo the beta mixing, then mix with the scaled weight.
        std::vector<double> x = b.y[i];
        x[a] -= b.beta;
        for (double& v : x) v /= 1.0 - b.beta;
        const double beta = std::min(1.0, factor * b.beta);
        std::vector<double> z(x.size());
        for (std::size_t c = 0; c < x.size(); ++c) z[c] = std::max(0.0, (1.0 - beta) * x[c]);
        z[a] += beta;
        d.per_block[k] = z;
        any = true;
      }
      if (any) add_mc("d5", factor > 1.0 ? "exit weight doubled" : "exit weight halved", d);
    }
  }

  rep.max_gain = 0.0;
  rep.max_gain_less_3se = 0.0;
  bool first = true;
  for (const auto& e : rep.entries) {
    if (first || e.gain > rep.max_gain) rep.max_gain = e.gain;
    if (first || e.gain - 3.0 * e.se > rep.max_gain_less_3se) rep.max_gain_less_3se = e.gain - 3.0 * e.se;
    first = false;
  }
  return rep;
}

nlohmann::json eval_to_json(const EvalReport& r) {
  return {{"gamma", r.gamma},
          {"Z", r.Z},
          {"masses", r.masses},
          {"ledger", r.ledger},
          {"eta", r.eta},
          {"total_absorption", r.total_absorption},
          {"detection_bound", r.detection_bound},
          {"distance_to_target", r.distance_to_target}};
}

nlohmann::json sim_to_json(const SimReport& r) {
  return {{"episodes", r.episodes},
          {"mean", r.mean},
          {"se", r.se},
          {"absorbed_fraction", r.absorbed_fraction},
          {"detection_fraction", r.detection_fraction},
          {"detection_se", r.detection_se},
          {"mean_stages", r.mean_stages}};
}

nlohmann::json deviation_to_json(const DeviationReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"family", e.family},
                       {"label", e.label},
                       {"block", e.block ? nlohmann::json(*e.block) : nlohmann::json(nullptr)},
                       {"payoff", e.payoff},
                       {"gain", e.gain},
                       {"se", e.se},
                       {"exact", e.exact}});
  }
  return {{"player", r.player},
          {"baseline", r.baseline},
          {"max_gain", r.max_gain},
          {"max_gain_less_3se", r.max_gain_less_3se},
          {"entries", entries}};
}

}  // namespace absorbing
