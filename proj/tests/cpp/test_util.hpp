#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "bicmp/data.hpp"
#include "bicmp/rng.hpp"
#include "bicmp/simgen.hpp"

namespace testutil {

// Poisson-scored league games (nu = 1 exactly) with the synthetic-league
// strengths, on a shuffled fixture list truncated to n_games.
inline std::vector<bicmp::GameRecord> make_poisson_league(long n_games,
                                                          std::uint64_t seed) {
  using namespace bicmp;
  const auto strengths = sim::table1_strengths();
  const auto names = sim::league_team_names();
  Rng rng = make_rng(seed, 0xabcd);
  std::vector<std::pair<int, int>> fixtures;
  for (int h = 0; h < sim::kLeagueSize; ++h)
    for (int a = 0; a < sim::kLeagueSize; ++a)
      if (h != a) fixtures.emplace_back(h, a);
  while (static_cast<long>(fixtures.size()) < n_games) {
    auto copy = fixtures;
    fixtures.insert(fixtures.end(), copy.begin(), copy.end());
  }
  std::shuffle(fixtures.begin(), fixtures.end(), rng);
  fixtures.resize(n_games);

  std::vector<GameRecord> games;
  games.reserve(n_games);
  for (long i = 0; i < n_games; ++i) {
    const auto [h, a] = fixtures[i];
    const double mu_home =
        std::exp(0.6 + strengths.attack_home[h] - strengths.defense_away[a]);
    const double mu_away =
        std::exp(0.1 + strengths.attack_away[a] - strengths.defense_home[h]);
    GameRecord g;
    g.game_id = i;
    g.season = "S01";
    g.home_team = names[h];
    g.away_team = names[a];
    g.phase = Phase::during;
    std::poisson_distribution<std::int64_t> ph(mu_home), pa(mu_away);
    g.home_score = ph(rng);
    g.away_score = pa(rng);
    games.push_back(std::move(g));
  }
  return games;
}

}  // namespace testutil
