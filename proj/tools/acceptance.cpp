// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Tolerances and budgets are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "absorbing/errors.hpp"
#include "absorbing/evaluation.hpp"
#include "absorbing/game_io.hpp"
#include "absorbing/generate.hpp"
#include "absorbing/pipeline.hpp"

using namespace absorbing;

namespace {

constexpr double kPayoffTol = 1e-12;
constexpr double kMinmaxTol = 1e-6;
constexpr double kDiscountedTol = 1e-3;
constexpr double kInYTol = 1e-6;
constexpr double kOrbitTol = 1e-12;
constexpr double kSE = 3.0;

constexpr double kStructureSeconds = 1.0;
constexpr double kCertificateSeconds = 60.0;
constexpr double kDynamicsSeconds = 600.0;
constexpr double kEndToEndSeconds = 600.0;

constexpr std::size_t kCertificateEpisodes = 100000;
constexpr std::size_t kEndToEndEpisodes = 100000;
constexpr std::size_t kFalsePositiveEpisodes = 10000;
constexpr int kDynamicsInstances = 200;
constexpr int kDynamicsSamples = 100;
constexpr int kRandomPatterns = 500;

std::string g_dir;
std::vector<Orbit> g_orbits;  // collected for the orbit contract
std::vector<std::pair<Game, std::vector<double>>> g_orbit_games;

Game instance(const std::string& name) { return load_game(g_dir + "/" + name + ".json"); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int report(int id, const std::function<Outcome()>& run) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const Error& e) {
    o = {false, std::string(error_name(e.code())) + ": " + e.what()};
  } catch (const std::exception& e) {
    o = {false, e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %d: %s (%.2fs) %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Game pattern_game(const std::vector<std::size_t>& sizes, const std::vector<bool>& absorbing) {
  RawGame raw;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    raw.players.push_back(std::to_string(i + 1));
    std::vector<std::string> acts;
    for (std::size_t a = 0; a < sizes[i]; ++a) acts.push_back("a" + std::to_string(a));
    raw.actions.push_back(acts);
  }
  for (std::size_t idx = 0; idx < absorbing.size(); ++idx) {
    if (!absorbing[idx]) continue;
    RawEntry e;
    e.profile.assign(sizes.size(), 0);
    std::size_t rem = idx;
    for (std::size_t i = sizes.size(); i-- > 0;) {
      e.profile[i] = static_cast<int>(rem % sizes[i]);
      rem /= sizes[i];
    }
    e.p = 1.0;
    e.r.assign(sizes.size(), 0.5);
    raw.entries.push_back(e);
  }
  return validate_game(raw);
}

using ProfileSet = std::set<Profile>;

ProfileSet product(const std::vector<std::vector<int>>& sets) {
  ProfileSet out{Profile{}};
  for (const auto& s : sets) {
    ProfileSet next;
    for (const auto& p : out) {
      for (int a : s) {
        Profile q = p;
        q.push_back(a);
        next.insert(q);
      }
    }
    out = next;
  }
  return out;
}

Outcome structure_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const Game g = instance("example2");
  const auto st = build_structure(g);
  // (a1', a2', a3''); {a1'''} x {a2'', a2'''} x {a3, a3', a3''};
  // {(a1, a2), (a1, a2'), (a1', a2)} x {a3, a3'}.
  std::vector<std::pair<ProfileSet, bool>> want{
      {ProfileSet{{1, 1, 2}}, true},
      {product({{3}, {2, 3}, {0, 1, 2}}), true},
      {{}, false}};
  for (const auto& ab : std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}}) {
    for (int c : {0, 1}) want[2].first.insert(Profile{ab.first, ab.second, c});
  }
  std::multiset<std::pair<ProfileSet, bool>> got, expect(want.begin(), want.end());
  for (const auto& c : st.components) {
    ProfileSet m;
    for (std::size_t idx : c.members) m.insert(g.profile(idx));
    got.insert({m, c.rectangular});
  }
  const bool pre_fails = !check_precondition(st).pass;
  const double t = elapsed(t0);
  return {got == expect && pre_fails && t < kStructureSeconds,
          std::to_string(st.components.size()) + " components, rectangular flags match as sets"};
}

Outcome exit_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const Game g = instance("example1");
  const auto corner = exits_at_support(g, {{0}, {0}});
  std::set<std::pair<std::vector<int>, std::vector<int>>> joint, single;
  for (const Exit& e : corner) (e.joint() ? joint : single).insert({e.coalition, e.actions});
  const decltype(joint) want_joint{{{0, 1}, {1, 1}}, {{0, 1}, {1, 2}}, {{0, 1}, {2, 1}}, {{0, 1}, {2, 2}}};
  const bool non_joint = single.count({{1}, {3}}) == 1;
  const bool off_corner = !has_joint_exit(g, {{1}, {0}});
  const double t = elapsed(t0);
  return {joint == want_joint && non_joint && off_corner && t < kStructureSeconds,
          std::to_string(joint.size()) + " joint exits at the corner, player-2 exit present, none at (a1', a2)"};
}

Outcome certificate() {
  const auto t0 = std::chrono::steady_clock::now();
  const Game g = instance("example1");
  RunConfig cfg;
  cfg.epsilon = 0.05;
  const Solution s = solve(g, cfg);
  if (s.kind != SolutionKind::ShortCircuit) return {false, "no short-circuit certificate"};
  const auto& b = s.spec.blocks.at(0);
  bool xi = b.kind == BlockKind::Certificate && b.exit && b.exit->joint();
  for (std::size_t m = 0; xi && m < b.exit->coalition.size(); ++m) {
    const auto i = static_cast<std::size_t>(b.exit->coalition[m]);
    xi = std::abs(b.y[i][static_cast<std::size_t>(b.exit->actions[m])] - b.beta) <= kPayoffTol;
  }
  const double d = std::max(std::abs(s.eval.gamma[0] - 0.5), std::abs(s.eval.gamma[1] - 0.5));
  DeviationOptions opt;
  opt.episodes = kCertificateEpisodes;
  double worst = -1.0;
  for (std::size_t i = 0; i < 2; ++i) {
    worst = std::max(worst, deviation_suite(g, s.spec, i, opt).max_gain_less_3se);
  }
  const double t = elapsed(t0);
  return {xi && d <= kPayoffTol && worst <= cfg.epsilon && t < kCertificateSeconds,
          fmt("payoff error %.3g, max gain - 3SE %.3g (bound 0.05)", d, worst)};
}

Outcome minmax_values() {
  const Game g = instance("example1");
  const auto mm = minmax_all(g);
  const double want[2] = {0.0, 0.25};
  double err = 0.0, disc = 0.0;
  bool certified = true;
  for (std::size_t i = 0; i < 2; ++i) {
    err = std::max(err, std::abs(mm.players[i].value - want[i]));
    certified = certified && mm.players[i].certified;
    const auto c = discounted_cross_check(g, i);
    if (!c) return {false, "no discounted check"};
    disc = std::max({disc, std::abs(c->values.back() - mm.players[i].value),
                     std::abs(c->extrapolated - mm.players[i].value)});
  }
  return {err <= kMinmaxTol && certified && disc <= kDiscountedTol,
          fmt("v = (%.8f, %.8f), discounted gap %.2g", mm.players[0].value, mm.players[1].value, disc)};
}

Outcome dynamics_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20261019);
  std::size_t samples = 0, failures = 0, tags[3] = {0, 0, 0};
  std::string first_failure;
  auto fail = [&](const std::string& why) {
    if (failures++ == 0) first_failure = why;
  };
  for (int s = 0; s < kDynamicsInstances; ++s) {
    const std::size_t n = 2 + static_cast<std::size_t>(s % 2);
    std::vector<std::size_t> acts;
    for (std::size_t i = 0; i < n; ++i) acts.push_back(2 + rng() % 2);
    const Game g = generate_instance(acts, 1000 + static_cast<std::uint64_t>(s));
    RunConfig cfg;
    const Analysis an = analyze(g, cfg);
    const SearchGrid grid = build_grid(g, an.structure, cfg);
    const auto v = an.minmax.values();
    for (int k = 0; k < kDynamicsSamples; ++k) {
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::uniform_real_distribution<double>(v[i] - cfg.epsilon, 1.0)(rng);
      }
      ++samples;
      try {
        const Classification c = classify(g, grid, w, classify_options(cfg));
        const DynamicsStep st = step_f(g, c, cfg.epsilon, v, cfg.tol_class);
        ++tags[static_cast<int>(c.tag)];
        const double sl = c.tag == Case::WL ? 0.0 : slack(w, rho(g, c.x));
        bool ok = st.mu > 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          ok = ok && st.f[i] >= v[i] - cfg.epsilon - kInYTol && st.f[i] <= 1.0 + kInYTol;
        }
        // The tag's defining condition holds at the witness; the others are
        // exclusive of it by construction.
        switch (c.tag) {
          case Case::W: ok = ok && std::abs(sl) <= cfg.tol_class; break;
          case Case::WH: ok = ok && sl > cfg.tol_class && c.exit && c.exit->joint(); break;
          case Case::WL:
            ok = ok && absorb_prob_mixed(g, c.x) > cfg.tol_class && c.nash_regret <= cfg.eps_nash;
            break;
        }
        if (!ok) fail("instance " + std::to_string(s) + " sample " + std::to_string(k));
      } catch (const Error& e) {
        fail(std::string(error_name(e.code())) + " on instance " + std::to_string(s));
      }
    }
    // Orbits of these instances feed the orbit contract.
    try {
      Solution sol = solve(g, cfg);
      if (sol.orbit) {
        g_orbits.push_back(*sol.orbit);
        g_orbit_games.emplace_back(g, v);
      }
    } catch (const Error&) {
    }
  }
  const double t = elapsed(t0);
  return {failures == 0 && t < kDynamicsSeconds,
          std::to_string(samples) + " samples (W " + std::to_string(tags[0]) + ", WH " +
              std::to_string(tags[1]) + ", WL " + std::to_string(tags[2]) + "), " +
              std::to_string(failures) + " violations" +
              (first_failure.empty() ? "" : ", first: " + first_failure)};
}

bool orbit_ok(const Game& g, const Orbit& o, std::span<const double> v, double epsilon,
              double& worst) {
  bool ok = true;
  for (double x : o.w.back()) ok = ok && x == 1.0;
  ok = ok && o.mu_sum >= 1.0 / o.delta;
  const double r = orbit_residual(g, o, v, epsilon, 1e-6);
  worst = std::max(worst, r);
  return ok && r <= kOrbitTol;
}

Outcome orbit_contract() {
  const Game hard = instance("ex1_hard");
  RunConfig cfg;
  cfg.delta = 0.4;
  const Analysis an = analyze(hard, cfg);
  const Orbit o = orbit_only(hard, cfg, an);
  double worst = 0.0;
  std::size_t bad = 0;
  if (!orbit_ok(hard, o, an.minmax.values(), cfg.epsilon, worst)) ++bad;
  for (std::size_t k = 0; k < g_orbits.size(); ++k) {
    if (!orbit_ok(g_orbit_games[k].first, g_orbits[k], g_orbit_games[k].second, 0.1, worst)) ++bad;
  }
  return {bad == 0, std::to_string(g_orbits.size() + 1) + " orbits, max residual " + fmt("%.3g", worst)};
}

Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const Game g = instance("ex1_hard");
  RunConfig cfg;
  cfg.epsilon = 0.1;
  cfg.delta = 0.4;
  const Solution s = solve(g, cfg);
  if (s.kind != SolutionKind::Orbit) return {false, "expected an orbit solution"};
  DeviationOptions opt;
  opt.episodes = kEndToEndEpisodes;
  double worst = -1.0, worst_raw = -1.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto r = deviation_suite(g, s.spec, i, opt);
    worst = std::max(worst, r.max_gain_less_3se);
    worst_raw = std::max(worst_raw, r.max_gain);
  }
  const double t = elapsed(t0);
  return {s.eval.distance_to_target <= 4 * cfg.epsilon && worst <= 7 * cfg.epsilon &&
              t < kEndToEndSeconds,
          fmt("||gamma - w0|| = %.4f (bound 0.4), max gain %.4f, less 3SE %.4f (bound 0.7)",
              s.eval.distance_to_target, worst_raw, worst)};
}

Outcome rectangularity_oracle() {
  std::size_t checked = 0, mismatches = 0;
  auto sweep = [&](const Game& g) {
    const auto st = build_structure(g);
    for (std::size_t l = 0; l < st.components.size(); ++l) {
      ++checked;
      // Direct product test on the member set.
      const auto& c = st.components[l];
      ProfileSet members;
      for (std::size_t idx : c.members) members.insert(g.profile(idx));
      const bool direct = members == product(c.projections);
      if (direct != c.rectangular || direct != rectangularity_via_exits(g, st, l)) ++mismatches;
    }
  };
  for (const auto& sizes : std::vector<std::vector<std::size_t>>{{2, 2}, {2, 3}}) {
    const std::size_t cells = sizes[0] * sizes[1];
    for (std::uint64_t mask = 0; mask < (1ULL << cells); ++mask) {
      std::vector<bool> abs(cells);
      for (std::size_t c = 0; c < cells; ++c) abs[c] = (mask >> c) & 1u;
      sweep(pattern_game(sizes, abs));
    }
  }
  std::mt19937_64 rng(8);
  for (int t = 0; t < kRandomPatterns; ++t) {
    const std::vector<std::size_t> sizes{2, 2 + rng() % 2, 2 + rng() % 2};
    const std::size_t cells = sizes[0] * sizes[1] * sizes[2];
    std::vector<bool> abs(cells);
    for (std::size_t c = 0; c < cells; ++c) abs[c] = rng() % 2 == 0;
    sweep(pattern_game(sizes, abs));
  }
  return {mismatches == 0,
          std::to_string(checked) + " components, " + std::to_string(mismatches) + " mismatches"};
}

Outcome false_positives() {
  const Game g = instance("ex1_hard");
  RunConfig cfg;
  cfg.delta = 0.4;
  const Solution s = solve(g, cfg);
  const SimReport r = simulate(g, s.spec, kFalsePositiveEpisodes, cfg.seed);
  const double bound = s.eval.detection_bound + kSE * r.detection_se;
  return {r.detection_fraction <= bound,
          fmt("detected %.4f of episodes, bound %.4f", r.detection_fraction, bound)};
}

}  // namespace

int main(int argc, char** argv) {
  g_dir = argc > 1 ? argv[1] : "instances";
  int failed = 0;
  failed += report(1, structure_reproduction);
  failed += report(2, exit_reproduction);
  failed += report(3, certificate);
  failed += report(4, minmax_values);
  failed += report(5, dynamics_properties);
  failed += report(6, orbit_contract);
  failed += report(7, end_to_end);
  failed += report(8, rectangularity_oracle);
  failed += report(9, false_positives);
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
