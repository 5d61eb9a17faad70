#include "absorbing/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "absorbing/errors.hpp"
#include "absorbing/game_io.hpp"

namespace absorbing {

std::string block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::Case1: return "case1";
    case BlockKind::Case2: return "case2";
    case BlockKind::Case3: return "case3";
    case BlockKind::Certificate: return "certificate";
  }
  return "?";
}

double block_horizon(double target, double p) {
  return std::max(1.0, std::round(std::log1p(-target) / std::log1p(-p)));
}

double block_mass(double T, double p) { return -std::expm1(T * std::log1p(-p)); }

double hoeffding_radius(std::size_t num_actions, std::uint64_t T, double eta, std::uint64_t n) {
  const double l = std::log(2.0 * static_cast<double>(num_actions) * static_cast<double>(T) / eta);
  return std::sqrt(l / (2.0 * static_cast<double>(n)));
}

namespace {

constexpr double kMaxHorizon = 4.611686018427387904e18;  // 2^62

MixedProfile put_mass(const MixedProfile& x, std::size_t i, int action, double beta) {
  MixedProfile y = x;
  for (double& v : y[i]) v *= 1.0 - beta;
  y[i][static_cast<std::size_t>(action)] += beta;
  return y;
}

// Fills p, payoff, and the informational deviation excess against w.
void describe(const Game& g, BlockSpec& b, std::span<const double> w) {
  const Contraction c = contract(g, b.y);
  b.p = c.p;
  b.payoff.clear();
  if (c.p > 0.0) {
    for (double v : c.pr) b.payoff.push_back(v / c.p);
  }
  b.deviation_excess = 0.0;
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    const auto replies = contract_unilateral(g, i, b.y);
    for (int a : b.y.support(i)) {
      const auto& r = replies[static_cast<std::size_t>(a)];
      if (!(r.p > 0.0)) continue;
      b.deviation_excess = std::max(b.deviation_excess, r.pr[i] / r.p - w[i]);
    }
  }
}

// Tries beta = 2^-first, 2^-(first+1), ... and keeps the first admissible block.
BlockSpec choose_beta(const Game& g, BlockSpec base, std::span<const double> w,
                      const SynthesisOptions& opt,
                      const std::function<MixedProfile(double)>& profile,
                      const std::function<bool(double T, double beta)>& admissible) {
  const double tol = std::min(opt.tol_block, base.eta / 4.0);
  for (int e = opt.beta_first_exponent; e <= opt.beta_last_exponent; ++e) {
    const double beta = std::ldexp(1.0, -e);
    BlockSpec b = base;
    b.beta = beta;
    b.y = profile(beta);
    const double p = absorb_prob_mixed(g, b.y);
    if (!(p > 0.0)) continue;
    const double T = block_horizon(b.target, p);
    if (!(T < kMaxHorizon)) continue;
    const double mass = block_mass(T, p);
    if (std::abs(mass - b.target) > tol || !admissible(T, beta)) continue;
    b.T = static_cast<std::uint64_t>(T);
    b.mass = mass;
    describe(g, b, w);
    return b;
  }
  throw Error(ErrorCode::HorizonOverflow,
              "no beta down to 2^-" + std::to_string(opt.beta_last_exponent) +
                  " meets the block mass tolerance");
}

void finish(const Game& g, const MinmaxResult& mm, StrategySpec& s) {
  std::uint64_t n = 0;
  s.start.clear();
  for (const auto& b : s.blocks) {
    s.start.push_back(n);
    n += b.T;
  }
  s.punish.clear();
  s.punish_value.clear();
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    s.punish.push_back(mm.punish(i));
    s.punish_value.push_back(best_reply_value(g, i, mm.punish(i)));
  }
}

}  // namespace

StrategySpec synthesize(const Game& g, const Orbit& orbit, const MinmaxResult& mm,
                        const SynthesisOptions& opt) {
  const std::size_t k0 = orbit.k0();
  if (k0 == 0) throw Error(ErrorCode::InvalidArgument, "empty orbit");
  StrategySpec s;
  s.epsilon = opt.epsilon;
  s.target = orbit.w.front();
  const double eta = opt.epsilon / (2.0 * static_cast<double>(k0));
  for (std::size_t k = 0; k < k0; ++k) {
    const DynamicsStep& st = orbit.steps[k];
    const Classification& cls = st.cls;
    BlockSpec base;
    base.eta = eta;
    base.target = st.mu;
    base.n_min = opt.n_min;
    switch (cls.tag) {
      case Case::WL: {
        base.kind = BlockKind::Case1;
        base.y = cls.x;
        base.T = 1;
        base.mass = absorb_prob_mixed(g, base.y);
        describe(g, base, st.w);
        s.blocks.push_back(std::move(base));
        break;
      }
      case Case::W: {
        base.kind = BlockKind::Case2;
        base.tested = true;
        base.i0 = cls.i0;
        base.action = cls.rho.action[static_cast<std::size_t>(cls.i0)];
        const auto i0 = static_cast<std::size_t>(cls.i0);
        const int a = base.action;
        s.blocks.push_back(choose_beta(
            g, base, st.w, opt, [&](double beta) { return put_mass(cls.x, i0, a, beta); },
            [&](double T, double) { return T <= opt.case2_max_horizon; }));
        break;
      }
      case Case::WH: {
        if (!(st.mu < 1.0)) {
          throw Error(ErrorCode::HorizonOverflow, "exit block would need absorption mass 1");
        }
        base.kind = BlockKind::Case3;
        base.tested = true;
        base.exit = cls.exit;
        base.i0 = cls.i0;
        const Exit e = *cls.exit;
        s.blocks.push_back(choose_beta(
            g, base, st.w, opt,
            [&](double beta) {
              MixedProfile y = cls.x;
              for (std::size_t m = 0; m < e.coalition.size(); ++m) {
                y = put_mass(y, static_cast<std::size_t>(e.coalition[m]), e.actions[m], beta);
              }
              return y;
            },
            [&](double T, double beta) { return T * beta >= opt.case3_min_exit_plays; }));
        break;
      }
    }
  }
  // Beyond the last block play is irrelevant; continue with a nonabsorbing
  // witness when there is one.
  const auto& last = orbit.steps.back().cls;
  s.tail = last.tag == Case::WL ? s.blocks.back().y : last.x;
  finish(g, mm, s);
  return s;
}

StrategySpec certificate_spec(const Game& g, const ShortCircuit& sc, const MinmaxResult& mm,
                              const SynthesisOptions& opt) {
  StrategySpec s;
  s.epsilon = opt.epsilon;
  s.certificate = true;
  s.target = sc.payoff;
  const std::size_t n = g.num_players();
  const double slack = opt.epsilon / 4.0;
  for (int e = opt.beta_first_exponent; e <= opt.beta_last_exponent; ++e) {
    const double beta = std::ldexp(1.0, -e);
    BlockSpec b;
    b.kind = BlockKind::Certificate;
    b.tested = true;
    b.n_min = opt.n_min;
    b.eta = opt.epsilon / 2.0;
    b.exit = sc.exit;
    b.beta = beta;
    b.y = sc.x;
    for (std::size_t m = 0; m < sc.exit.coalition.size(); ++m) {
      b.y = put_mass(b.y, static_cast<std::size_t>(sc.exit.coalition[m]), sc.exit.actions[m], beta);
    }
    // Replies that already absorb against x must stay below the exit payoff.
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto at_x = contract_unilateral(g, i, sc.x);
      const auto at_y = contract_unilateral(g, i, b.y);
      for (std::size_t a = 0; a < at_x.size(); ++a) {
        if (at_x[a].p > 0.0 && at_y[a].pr[i] / at_y[a].p > sc.payoff[i] + slack) ok = false;
      }
    }
    const double p = absorb_prob_mixed(g, b.y);
    if (!ok || !(p > 0.0)) continue;
    const double T = std::max(1.0, std::ceil(std::log(slack) / std::log1p(-p)));
    if (!(T < kMaxHorizon) || T * beta < opt.case3_min_exit_plays) continue;
    b.T = static_cast<std::uint64_t>(T);
    b.target = 1.0 - slack;
    b.mass = block_mass(T, p);
    describe(g, b, sc.payoff);
    s.tail = b.y;
    s.blocks.push_back(std::move(b));
    finish(g, mm, s);
    return s;
  }
  throw Error(ErrorCode::HorizonOverflow, "no beta makes the certificate profile admissible");
}

double block_log_term(const BlockSpec& b, std::size_t player) {
  return std::log(2.0 * static_cast<double>(b.y[player].size()) * static_cast<double>(b.T) / b.eta);
}

Monitor::Monitor(const StrategySpec& spec) : spec_(&spec) {
  for (const auto& b : spec.blocks) {
    std::vector<double> l;
    for (std::size_t i = 0; i < b.y.num_players(); ++i) {
      l.push_back(b.tested ? block_log_term(b, i) : 0.0);
    }
    log_terms_.push_back(std::move(l));
  }
  enter_block(0);
}

void Monitor::reset() {
  punished_ = -1;
  enter_block(0);
}

void Monitor::enter_block(std::size_t k) {
  block_ = k;
  n_ = 0;
  if (k < spec_->blocks.size()) {
    const auto& y = spec_->blocks[k].y;
    counts_.resize(y.num_players());
    for (std::size_t i = 0; i < y.num_players(); ++i) counts_[i].assign(y[i].size(), 0);
  }
}

bool Monitor::frequency_violation(double gap, std::uint64_t n, double log_term) {
  return gap * gap > 0.5 * log_term * static_cast<double>(n);
}

int Monitor::observe(std::span<const int> actions) {
  if (punished_ >= 0 || in_tail()) return -1;
  const BlockSpec& b = spec_->blocks[block_];
  ++n_;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto a = static_cast<std::size_t>(actions[i]);
    ++counts_[i][a];
    if (!b.tested) continue;
    if (b.y[i][a] == 0.0) {
      punished_ = static_cast<int>(i);
      return punished_;
    }
    if (n_ < b.n_min) continue;
    double gap = 0.0;
    const double nd = static_cast<double>(n_);
    for (std::size_t c = 0; c < counts_[i].size(); ++c) {
      gap = std::max(gap, std::abs(static_cast<double>(counts_[i][c]) - nd * b.y[i][c]));
    }
    if (frequency_violation(gap, n_, log_terms_[block_][i])) {
      punished_ = static_cast<int>(i);
      return punished_;
    }
  }
  if (n_ >= b.T) enter_block(block_ + 1);
  return -1;
}

const MixedProfile& Monitor::current() const {
  if (punished_ >= 0) return spec_->punish[static_cast<std::size_t>(punished_)];
  if (in_tail()) return spec_->tail;
  return spec_->blocks[block_].y;
}

MixedProfile strategy_at(const StrategySpec& spec, std::span<const Profile> history) {
  Monitor m(spec);
  for (const Profile& a : history) m.observe(a);
  return m.current();
}

namespace {

nlohmann::json exit_to_json(const std::optional<Exit>& e) {
  if (!e) return nullptr;
  return {{"coalition", e->coalition}, {"actions", e->actions}};
}

std::optional<Exit> exit_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return Exit{j.at("coalition").get<std::vector<int>>(), j.at("actions").get<std::vector<int>>()};
}

BlockKind kind_from_name(const std::string& s) {
  for (BlockKind k : {BlockKind::Case1, BlockKind::Case2, BlockKind::Case3, BlockKind::Certificate}) {
    if (block_kind_name(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown block kind " + s);
}

}  // namespace

nlohmann::json block_to_json(const BlockSpec& b) {
  return {{"kind", block_kind_name(b.kind)},
          {"y", profile_to_json(b.y)},
          {"T", b.T},
          {"beta", b.beta},
          {"target", b.target},
          {"mass", b.mass},
          {"p", b.p},
          {"payoff", b.payoff},
          {"eta", b.eta},
          {"tested", b.tested},
          {"n_min", b.n_min},
          {"i0", b.i0},
          {"action", b.action},
          {"exit", exit_to_json(b.exit)},
          {"deviation_excess", b.deviation_excess}};
}

nlohmann::json spec_to_json(const StrategySpec& s) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : s.blocks) blocks.push_back(block_to_json(b));
  nlohmann::json punish = nlohmann::json::array();
  for (const auto& p : s.punish) punish.push_back(profile_to_json(p));
  return {{"certificate", s.certificate},
          {"epsilon", s.epsilon},
          {"target", s.target},
          {"blocks", blocks},
          {"start", s.start},
          {"tail", profile_to_json(s.tail)},
          {"punish", punish},
          {"punish_value", s.punish_value},
          {"deviator_tie_break", "lowest index"}};
}

StrategySpec spec_from_json(const nlohmann::json& j) {
  StrategySpec s;
  try {
    s.certificate = j.at("certificate").get<bool>();
    s.epsilon = j.at("epsilon").get<double>();
    s.target = j.at("target").get<PayoffVector>();
    for (const auto& jb : j.at("blocks")) {
      BlockSpec b;
      b.kind = kind_from_name(jb.at("kind").get<std::string>());
      b.y = profile_from_json(jb.at("y"));
      b.T = jb.at("T").get<std::uint64_t>();
      b.beta = jb.at("beta").get<double>();
      b.target = jb.at("target").get<double>();
      b.mass = jb.at("mass").get<double>();
      b.p = jb.at("p").get<double>();
      b.payoff = jb.at("payoff").get<PayoffVector>();
      b.eta = jb.at("eta").get<double>();
      b.tested = jb.at("tested").get<bool>();
      b.n_min = jb.at("n_min").get<std::size_t>();
      b.i0 = jb.at("i0").get<int>();
      b.action = jb.at("action").get<int>();
      b.exit = exit_from_json(jb.at("exit"));
      b.deviation_excess = jb.at("deviation_excess").get<double>();
      s.blocks.push_back(std::move(b));
    }
    s.start = j.at("start").get<std::vector<std::uint64_t>>();
    s.tail = profile_from_json(j.at("tail"));
    for (const auto& p : j.at("punish")) s.punish.push_back(profile_from_json(p));
    s.punish_value = j.at("punish_value").get<PayoffVector>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed strategy: ") + e.what());
  }
  return s;
}

}  // namespace absorbing
