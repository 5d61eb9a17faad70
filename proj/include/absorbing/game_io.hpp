#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "absorbing/game.hpp"
#include "json.hpp"

namespace absorbing {

using json = nlohmann::json;

// {"players": [...], "actions": [[...], ...],
//  "entries": [{"profile": [...], "p": x, "r": [...]}], "metadata": {...}}
RawGame raw_game_from_json(const json& j);
Game game_from_json(const json& j);

// Canonical form: entries sorted by profile, nonabsorbing profiles omitted.
json game_to_json(const Game& g);

Game load_game(const std::filesystem::path& path);
void save_game(const Game& g, const std::filesystem::path& path);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string content_hash(const Game& g);

json profile_to_json(const MixedProfile& x);
MixedProfile profile_from_json(const json& j);

// Payoffs may be -inf (no absorbing reply); JSON carries those as null.
json payoff_to_json(std::span<const double> v);

}  // namespace absorbing
