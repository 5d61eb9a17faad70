#include "absorbing/pipeline.hpp"

#include <cmath>

#include "absorbing/errors.hpp"

namespace absorbing {

Analysis analyze(const Game& g, const RunConfig& cfg) {
  Analysis a;
  a.structure = build_structure(g);
  a.precondition = check_precondition(a.structure);
  a.nonabsorbing_equilibrium = find_nonabsorbing_equilibrium(g, a.structure);
  MinmaxOptions mo;
  mo.tol_v = cfg.tol_v;
  mo.restarts = cfg.restarts;
  mo.seed = cfg.seed;
  a.minmax = minmax_all(g, mo);
  return a;
}

std::string solution_kind_name(SolutionKind k) {
  switch (k) {
    case SolutionKind::NonabsorbingEquilibrium: return "nonabsorbing-equilibrium";
    case SolutionKind::ShortCircuit: return "short-circuit";
    case SolutionKind::Orbit: return "orbit";
  }
  return "?";
}

SearchGrid build_grid(const Game& g, const AbsorptionStructure& st, const RunConfig& cfg) {
  return SearchGrid::build(g, st, cfg.mesh);
}

ClassifyOptions classify_options(const RunConfig& cfg) {
  ClassifyOptions o;
  o.epsilon = cfg.epsilon;
  o.tol_class = cfg.tol_class;
  o.eps_nash = cfg.eps_nash;
  o.seed = cfg.seed;
  return o;
}

OrbitOptions orbit_options(const RunConfig& cfg) {
  OrbitOptions o;
  o.epsilon = cfg.epsilon;
  o.delta = cfg.delta_value();
  o.k_max = cfg.k_max;
  o.classify = classify_options(cfg);
  return o;
}

Orbit orbit_only(const Game& g, const RunConfig& cfg, const Analysis& a) {
  cfg.validate();
  if (!a.precondition.pass) {
    throw Error(ErrorCode::RectangularComponentFound,
                "component " + std::to_string(*a.precondition.rectangular_component) +
                    " is rectangular");
  }
  return build_orbit(g, build_grid(g, a.structure, cfg), a.minmax.values(), orbit_options(cfg));
}

Solution solve(const Game& g, const RunConfig& cfg) {
  cfg.validate();
  Solution s;
  s.analysis = analyze(g, cfg);
  if (!s.analysis.precondition.pass) {
    throw Error(ErrorCode::RectangularComponentFound,
                "component " + std::to_string(*s.analysis.precondition.rectangular_component) +
                    " is rectangular");
  }
  const MinmaxResult& mm = s.analysis.minmax;
  SynthesisOptions so;
  so.epsilon = cfg.epsilon;
  if (s.analysis.nonabsorbing_equilibrium) {
    s.kind = SolutionKind::NonabsorbingEquilibrium;
    s.spec.epsilon = cfg.epsilon;
    s.spec.certificate = true;
    s.spec.tail = *s.analysis.nonabsorbing_equilibrium;
    s.spec.target.assign(g.num_players(), 0.0);
    for (std::size_t i = 0; i < g.num_players(); ++i) {
      s.spec.punish.push_back(mm.punish(i));
      s.spec.punish_value.push_back(best_reply_value(g, i, mm.punish(i)));
    }
    s.eval = exact_eval(g, s.spec);
    return s;
  }
  const SearchGrid grid = build_grid(g, s.analysis.structure, cfg);
  s.certificate = lemma_multi_check(g, grid);
  if (s.certificate) {
    s.kind = SolutionKind::ShortCircuit;
    s.spec = certificate_spec(g, *s.certificate, mm, so);
    s.eval = exact_eval(g, s.spec);
    return s;
  }
  s.orbit = build_orbit(g, grid, mm.values(), orbit_options(cfg));
  s.spec = synthesize(g, *s.orbit, mm, so);
  s.eval = exact_eval(g, s.spec, &*s.orbit);
  return s;
}

json structure_to_json(const Game& g, const AbsorptionStructure& st, const PreconditionResult& pre) {
  json comps = json::array();
  for (std::size_t l = 0; l < st.components.size(); ++l) {
    const auto& c = st.components[l];
    json members = json::array();
    for (std::size_t idx : c.members) members.push_back(g.profile(idx));
    json catalog = json::array();
    for (const Support& sup : maximal_supports(g, st, l)) {
      json exits = json::array();
      for (const Exit& e : exits_at_support(g, sup)) {
        exits.push_back({{"coalition", e.coalition}, {"actions", e.actions}, {"joint", e.joint()}});
      }
      catalog.push_back({{"support", sup}, {"exits", exits}});
    }
    comps.push_back({{"members", members},
                     {"projections", c.projections},
                     {"rectangular", c.rectangular},
                     {"witness", c.witness ? json(*c.witness) : json(nullptr)},
                     {"exits", catalog}});
  }
  json nonabs = json::array();
  for (std::size_t idx : st.nonabsorbing) nonabs.push_back(g.profile(idx));
  return {{"nonabsorbing", nonabs},
          {"components", comps},
          {"precondition",
           {{"pass", pre.pass},
            {"rectangular_component",
             pre.rectangular_component ? json(*pre.rectangular_component) : json(nullptr)}}}};
}

json minmax_to_json(const Game& g, const MinmaxResult& mm) {
  json players = json::array();
  for (std::size_t i = 0; i < mm.players.size(); ++i) {
    const auto& e = mm.players[i];
    json entry = {{"value", e.value},         {"lower", e.lower},
                  {"certified", e.certified}, {"punish", profile_to_json(e.punish)},
                  {"iterations", e.iterations}, {"restarts", e.restarts},
                  {"residual", e.residual}};
    if (auto d = discounted_cross_check(g, i)) {
      entry["discounted"] = {{"lambdas", d->lambdas},
                             {"values", d->values},
                             {"extrapolated", d->extrapolated}};
    }
    players.push_back(entry);
  }
  return {{"values", mm.values()}, {"players", players}};
}

json analysis_to_json(const Game& g, const Analysis& a) {
  return {{"structure", structure_to_json(g, a.structure, a.precondition)},
          {"nonabsorbing_equilibrium", a.nonabsorbing_equilibrium
                                           ? profile_to_json(*a.nonabsorbing_equilibrium)
                                           : json(nullptr)},
          {"minmax", minmax_to_json(g, a.minmax)}};
}

namespace {

json exit_json(const Exit& e) { return {{"coalition", e.coalition}, {"actions", e.actions}}; }

}  // namespace

json classification_to_json(const Classification& c) {
  json j = {{"case", case_name(c.tag)},
            {"w", c.w},
            {"s_star", std::isfinite(c.s_star) ? json(c.s_star) : json(nullptr)},
            {"x", profile_to_json(c.x)},
            {"i0", c.i0}};
  if (c.tag != Case::WL) j["rho"] = payoff_to_json(c.rho.value);
  if (c.exit) {
    j["exit"] = exit_json(*c.exit);
    j["exit_payoff"] = c.exit_payoff;
    j["margin"] = c.margin;
  }
  if (c.tag == Case::W) j["refined"] = c.refined;
  if (c.tag == Case::WL) j["nash_regret"] = c.nash_regret;
  if (c.grid_index) j["grid_index"] = *c.grid_index;
  return j;
}

json step_to_json(const DynamicsStep& s) {
  json j = {{"w", s.w}, {"classification", classification_to_json(s.cls)}, {"f", s.f}, {"mu", s.mu}};
  if (s.cls.tag == Case::W) j["q"] = s.q;
  if (s.cls.tag == Case::WH) {
    j["alpha"] = s.alpha;
    j["alpha_player"] = s.alpha_player;
  }
  return j;
}

json orbit_to_json(const Orbit& o) {
  json steps = json::array();
  for (const auto& s : o.steps) steps.push_back(step_to_json(s));
  return {{"K0", o.k0()},
          {"delta", o.delta},
          {"mu_sum", o.mu_sum},
          {"fixed_point_repeats", o.fixed_point_repeats},
          {"w", o.w},
          {"steps", steps}};
}

json certificate_to_json(const ShortCircuit& sc) {
  return {{"x", profile_to_json(sc.x)},
          {"exit", exit_json(sc.exit)},
          {"payoff", sc.payoff},
          {"rho", payoff_to_json(sc.rho.value)}};
}

json solution_to_json(const Game& g, const Solution& s) {
  json j = {{"kind", solution_kind_name(s.kind)},
            {"analysis", analysis_to_json(g, s.analysis)},
            {"strategy", spec_to_json(s.spec)},
            {"evaluation", eval_to_json(s.eval)},
            {"payoff", s.eval.gamma}};
  if (s.certificate) j["certificate"] = certificate_to_json(*s.certificate);
  if (s.orbit) j["orbit"] = orbit_to_json(*s.orbit);
  return j;
}

json envelope(const std::string& schema, const Game& g, const RunConfig& cfg, json body) {
  json j = {{"schema", schema},
            {"version", 1},
            {"config", config_to_json(cfg)},
            {"instance_hash", content_hash(g)}};
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

}  // namespace absorbing
