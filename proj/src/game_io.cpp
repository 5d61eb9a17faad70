#include "absorbing/game_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "absorbing/errors.hpp"

namespace absorbing {

RawGame raw_game_from_json(const json& j) {
  RawGame raw;
  try {
    raw.players = j.at("players").get<std::vector<std::string>>();
    raw.actions = j.at("actions").get<std::vector<std::vector<std::string>>>();
    for (const json& e : j.at("entries")) {
      RawEntry entry;
      entry.profile = e.at("profile").get<Profile>();
      entry.p = e.at("p").get<double>();
      if (e.contains("r") && !e.at("r").is_null()) entry.r = e.at("r").get<std::vector<double>>();
      raw.entries.push_back(std::move(entry));
    }
    if (j.contains("metadata")) raw.metadata = j.at("metadata").dump();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidGame, std::string("malformed game file: ") + ex.what());
  }
  return raw;
}

Game game_from_json(const json& j) { return validate_game(raw_game_from_json(j)); }

json game_to_json(const Game& g) {
  json j;
  j["players"] = g.players();
  json actions = json::array();
  for (std::size_t i = 0; i < g.num_players(); ++i) actions.push_back(g.actions(i));
  j["actions"] = actions;
  json entries = json::array();
  for (std::size_t idx = 0; idx < g.num_profiles(); ++idx) {
    if (!g.absorbing(idx)) continue;
    entries.push_back({{"profile", g.profile(idx)}, {"p", g.p(idx)}, {"r", g.r(idx)}});
  }
  j["entries"] = entries;
  if (!g.metadata().empty()) j["metadata"] = json::parse(g.metadata());
  return j;
}

Game load_game(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::Io, "cannot parse " + path.string() + ": " + ex.what());
  }
  return game_from_json(j);
}

void save_game(const Game& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << game_to_json(g).dump(2) << "\n";
}

std::string content_hash(const Game& g) {
  json j = game_to_json(g);
  j.erase("metadata");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json profile_to_json(const MixedProfile& x) { return x.data(); }

MixedProfile profile_from_json(const json& j) {
  return MixedProfile(j.get<std::vector<std::vector<double>>>());
}

json payoff_to_json(std::span<const double> v) {
  json out = json::array();
  for (double x : v) {
    if (std::isfinite(x)) out.push_back(x);
    else out.push_back(nullptr);
  }
  return out;
}

}  // namespace absorbing
