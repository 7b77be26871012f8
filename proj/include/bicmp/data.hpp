#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bicmp {

enum class Phase { before, during, after };

std::string to_string(Phase phase);
std::optional<Phase> phase_from_string(const std::string& text);

// One observed game. Scores are the paired outcome (home = outcome 1,
// away = outcome 2); the phase label is supplied with the data, not inferred.
struct GameRecord {
  std::int64_t game_id = 0;
  std::string season;
  std::string home_team;
  std::string away_team;
  std::int64_t home_score = 0;
  std::int64_t away_score = 0;
  Phase phase = Phase::during;
};

class UnknownTeamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stable team <-> index mapping (first-appearance order when built from data).
class TeamRoster {
 public:
  explicit TeamRoster(std::vector<std::string> names);
  static TeamRoster from_games(const std::vector<GameRecord>& games);

  int index_of(const std::string& name) const;
  const std::string& name(int index) const { return names_.at(index); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

// Basic record validation shared by the parser and the generator.
void validate_games(const std::vector<GameRecord>& games);

}  // namespace bicmp
