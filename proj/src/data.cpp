#include "bicmp/data.hpp"

namespace bicmp {

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::before:
      return "before";
    case Phase::during:
      return "during";
    case Phase::after:
      return "after";
  }
  return "during";
}

std::optional<Phase> phase_from_string(const std::string& text) {
  if (text == "before") return Phase::before;
  if (text == "during") return Phase::during;
  if (text == "after") return Phase::after;
  return std::nullopt;
}

TeamRoster::TeamRoster(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("TeamRoster: empty roster");
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!index_.emplace(names_[i], i).second)
      throw std::invalid_argument("TeamRoster: duplicate team '" + names_[i] + "'");
  }
}

TeamRoster TeamRoster::from_games(const std::vector<GameRecord>& games) {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> seen;
  for (const auto& g : games) {
    for (const auto* team : {&g.home_team, &g.away_team}) {
      if (seen.emplace(*team, 1).second) names.push_back(*team);
    }
  }
  return TeamRoster(std::move(names));
}

int TeamRoster::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw UnknownTeamError("unknown team id '" + name + "'");
  return it->second;
}

void validate_games(const std::vector<GameRecord>& games) {
  for (const auto& g : games) {
    if (g.home_team == g.away_team)
      throw std::invalid_argument("game " + std::to_string(g.game_id) +
                                  ": home and away team coincide");
    if (g.home_score < 0 || g.away_score < 0)
      throw std::invalid_argument("game " + std::to_string(g.game_id) +
                                  ": negative score");
  }
}

}  // namespace bicmp
