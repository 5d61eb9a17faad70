#pragma once

// End-to-end analysis and solving, plus the JSON reports the CLI emits.

#include <optional>
#include <string>

#include "absorbing/config.hpp"
#include "absorbing/evaluation.hpp"
#include "absorbing/game_io.hpp"
#include "absorbing/orbit.hpp"
#include "absorbing/strategy.hpp"

namespace absorbing {

struct Analysis {
  AbsorptionStructure structure;
  PreconditionResult precondition;
  std::optional<MixedProfile> nonabsorbing_equilibrium;
  MinmaxResult minmax;
};

Analysis analyze(const Game& g, const RunConfig& cfg);

enum class SolutionKind { NonabsorbingEquilibrium, ShortCircuit, Orbit };
std::string solution_kind_name(SolutionKind k);

struct Solution {
  SolutionKind kind = SolutionKind::Orbit;
  Analysis analysis;
  std::optional<ShortCircuit> certificate;
  std::optional<Orbit> orbit;
  StrategySpec spec;
  EvalReport eval;
};

// Throws RectangularComponentFound when a component is rectangular. A game
// with a nonabsorbing 0-equilibrium is solved by that stationary profile.
Solution solve(const Game& g, const RunConfig& cfg);
ClassifyOptions classify_options(const RunConfig& cfg);
OrbitOptions orbit_options(const RunConfig& cfg);
// The orbit alone, built even when a short-circuit certificate exists.
Orbit orbit_only(const Game& g, const RunConfig& cfg, const Analysis& a);
SearchGrid build_grid(const Game& g, const AbsorptionStructure& st, const RunConfig& cfg);

json structure_to_json(const Game& g, const AbsorptionStructure& st, const PreconditionResult& pre);
json minmax_to_json(const Game& g, const MinmaxResult& mm);
json analysis_to_json(const Game& g, const Analysis& a);
json classification_to_json(const Classification& c);
json step_to_json(const DynamicsStep& s);
json orbit_to_json(const Orbit& o);
json certificate_to_json(const ShortCircuit& sc);
json solution_to_json(const Game& g, const Solution& s);

// Common envelope: {"schema": ..., "config": ..., "instance_hash": ..., body}.
json envelope(const std::string& schema, const Game& g, const RunConfig& cfg, json body);

}  // namespace absorbing
