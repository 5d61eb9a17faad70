// absorbing-cli: analysis, solving and certification of positive recursive
// absorbing games. Reports are JSON on stdout (or --out); errors are JSON too.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absorbing/config.hpp"
#include "absorbing/errors.hpp"
#include "absorbing/evaluation.hpp"
#include "absorbing/game_io.hpp"
#include "absorbing/generate.hpp"
#include "absorbing/pipeline.hpp"

using namespace absorbing;

namespace {

struct Common {
  std::string instance;
  std::string out;
  RunConfig cfg;
  double delta = 0.0;  // 0 keeps the automatic value
};

void add_common(CLI::App* sub, Common& c, bool with_instance = true) {
  if (with_instance) sub->add_option("instance", c.instance, "game JSON file")->required();
  sub->add_option("--epsilon", c.cfg.epsilon, "target accuracy, in (0,1)")->capture_default_str();
  sub->add_option("--delta", c.delta, "orbit mass parameter; default -0.8/ln(epsilon)");
  sub->add_option("--mesh", c.cfg.mesh, "grid step for the witness search")->capture_default_str();
  sub->add_option("--tol-class", c.cfg.tol_class, "classification tolerance")->capture_default_str();
  sub->add_option("--tol-v", c.cfg.tol_v, "minmax tolerance")->capture_default_str();
  sub->add_option("--eps-nash", c.cfg.eps_nash, "one-shot Nash regret tolerance")->capture_default_str();
  sub->add_option("--seed", c.cfg.seed, "random seed")->capture_default_str();
  sub->add_option("--episodes", c.cfg.episodes, "Monte Carlo episodes")->capture_default_str();
  sub->add_option("--k-max", c.cfg.k_max, "orbit step budget")->capture_default_str();
  sub->add_option("--restarts", c.cfg.restarts, "Nash search restarts")->capture_default_str();
  sub->add_option("--out,-o", c.out, "write the report here instead of stdout");
}

void finalize(Common& c) {
  if (c.delta > 0.0) c.cfg.delta = c.delta;
  c.cfg.validate();
}

void emit(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "write failed for " + path);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "not a number: '" + item + "'");
    }
  }
  return v;
}

int fail(ErrorCode code, const std::string& msg) {
  const int status = exit_status(code);
  const json j = {{"schema", "error"},
                  {"version", 1},
                  {"error", error_name(code)},
                  {"message", msg},
                  {"exit_status", status}};
  std::cout << j.dump(2) << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of positive recursive absorbing games"};
  app.require_subcommand(1);
  std::size_t workers = 0;
  app.add_option("--workers", workers, "simulation threads; 0 uses all cores");

  Common an, cl, so, ob, ve, si;
  auto* analyze_cmd = app.add_subcommand("analyze", "absorption structure and minmax values");
  add_common(analyze_cmd, an);

  auto* classify_cmd = app.add_subcommand("classify", "case of one payoff vector and one dynamics step");
  add_common(classify_cmd, cl);
  std::string w_text;
  classify_cmd->add_option("--w", w_text, "comma-separated payoff vector")->required();

  auto* solve_cmd = app.add_subcommand("solve", "certificate or orbit, strategy and exact payoff");
  add_common(solve_cmd, so);

  auto* orbit_cmd = app.add_subcommand("orbit", "full orbit with per-step cases and witnesses");
  add_common(orbit_cmd, ob);

  auto* verify_cmd = app.add_subcommand("verify", "unilateral deviation report");
  add_common(verify_cmd, ve);
  std::string families = "d1,d2,d3,d4,d5";
  std::vector<std::size_t> verify_players;
  verify_cmd->add_option("--deviations", families, "comma list of d1..d5")->capture_default_str();
  verify_cmd->add_option("--player", verify_players, "0-based players (default all)");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo play of the strategy profile");
  add_common(simulate_cmd, si);

  auto* gen_cmd = app.add_subcommand("gen", "random instance");
  std::size_t players = 2;
  std::vector<std::size_t> actions{2};
  std::uint64_t gen_seed = 1;
  GenerateOptions gopt;
  std::string gen_out;
  gen_cmd->add_option("--players", players, "number of players")->capture_default_str();
  gen_cmd->add_option("--actions", actions, "actions per player (one value or one per player)");
  gen_cmd->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  gen_cmd->add_flag("--allow-rectangular", gopt.allow_rectangular, "keep rectangular components");
  gen_cmd->add_flag("--allow-nonabsorbing-equilibrium", gopt.allow_nonabsorbing_equilibrium,
                    "keep games with a stationary nonabsorbing equilibrium");
  gen_cmd->add_option("--payoff-lo", gopt.payoff_lo, "lowest absorbing payoff")->capture_default_str();
  gen_cmd->add_option("--payoff-hi", gopt.payoff_hi, "highest absorbing payoff")->capture_default_str();
  gen_cmd->add_option("--out,-o", gen_out, "write the instance here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  set_worker_count(workers);

  try {
    if (*analyze_cmd) {
      finalize(an);
      const Game g = load_game(an.instance);
      const Analysis a = analyze(g, an.cfg);
      emit(envelope("analysis", g, an.cfg, analysis_to_json(g, a)), an.out);
      // The report is complete; the status still flags the failed precondition.
      return a.precondition.pass ? 0 : exit_status(ErrorCode::RectangularComponentFound);
    }
    if (*classify_cmd) {
      finalize(cl);
      const Game g = load_game(cl.instance);
      const std::vector<double> w = parse_list(w_text);
      if (w.size() != g.num_players()) {
        throw Error(ErrorCode::InvalidArgument, "--w needs one value per player");
      }
      const Analysis a = analyze(g, cl.cfg);
      if (!a.precondition.pass) {
        throw Error(ErrorCode::RectangularComponentFound, "instance has a rectangular component");
      }
      const SearchGrid grid = build_grid(g, a.structure, cl.cfg);
      const Classification c = classify(g, grid, w, classify_options(cl.cfg));
      const DynamicsStep st =
          step_f(g, c, cl.cfg.epsilon, a.minmax.values(), cl.cfg.tol_class);
      emit(envelope("classification", g, cl.cfg,
                    {{"classification", classification_to_json(c)}, {"step", step_to_json(st)}}),
           cl.out);
      return 0;
    }
    if (*solve_cmd) {
      finalize(so);
      const Game g = load_game(so.instance);
      const Solution s = solve(g, so.cfg);
      emit(envelope("solution", g, so.cfg, solution_to_json(g, s)), so.out);
      return 0;
    }
    if (*orbit_cmd) {
      finalize(ob);
      const Game g = load_game(ob.instance);
      const Analysis a = analyze(g, ob.cfg);
      const Orbit o = orbit_only(g, ob.cfg, a);
      emit(envelope("orbit", g, ob.cfg, {{"orbit", orbit_to_json(o)}}), ob.out);
      return 0;
    }
    if (*verify_cmd) {
      finalize(ve);
      const Game g = load_game(ve.instance);
      DeviationOptions dopt;
      dopt.episodes = ve.cfg.episodes;
      dopt.seed = ve.cfg.seed;
      dopt.families.clear();
      std::stringstream ss(families);
      for (std::string f; std::getline(ss, f, ',');) {
        if (f != "d1" && f != "d2" && f != "d3" && f != "d4" && f != "d5") {
          throw Error(ErrorCode::InvalidArgument, "unknown deviation family '" + f + "'");
        }
        dopt.families.insert(f);
      }
      const Solution s = solve(g, ve.cfg);
      if (verify_players.empty()) {
        for (std::size_t i = 0; i < g.num_players(); ++i) verify_players.push_back(i);
      }
      json reports = json::array();
      double worst = 0.0, worst_less = 0.0;
      for (std::size_t i : verify_players) {
        if (i >= g.num_players()) throw Error(ErrorCode::InvalidArgument, "no such player");
        const DeviationReport r = deviation_suite(g, s.spec, i, dopt);
        worst = std::max(worst, r.max_gain);
        worst_less = std::max(worst_less, r.max_gain_less_3se);
        reports.push_back(deviation_to_json(r));
      }
      emit(envelope("deviations", g, ve.cfg,
                    {{"solution_kind", solution_kind_name(s.kind)},
                     {"families", dopt.families},
                     {"reports", reports},
                     {"max_gain", worst},
                     {"max_gain_less_3se", worst_less}}),
           ve.out);
      return 0;
    }
    if (*simulate_cmd) {
      finalize(si);
      const Game g = load_game(si.instance);
      const Solution s = solve(g, si.cfg);
      const SimReport r = simulate(g, s.spec, si.cfg.episodes, si.cfg.seed);
      emit(envelope("simulation", g, si.cfg,
                    {{"solution_kind", solution_kind_name(s.kind)},
                     {"exact", eval_to_json(s.eval)},
                     {"simulation", sim_to_json(r)}}),
           si.out);
      return 0;
    }
    if (*gen_cmd) {
      if (actions.size() == 1) actions.assign(players, actions.front());
      if (actions.size() != players) {
        throw Error(ErrorCode::InvalidArgument, "--actions needs one value or one per player");
      }
      const Game g = generate_instance(actions, gen_seed, gopt);
      if (gen_out.empty()) {
        std::cout << game_to_json(g).dump(2) << "\n";
      } else {
        save_game(g, gen_out);
      }
      return 0;
    }
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const json::exception& e) {
    return fail(ErrorCode::Io, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::InvalidArgument, e.what());
  }
  return 0;
}
