#include "bicmp/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "bicmp/cmp.hpp"
#include "bicmp/distributions.hpp"
#include "bicmp/rng.hpp"

namespace bicmp::sim {

std::string to_string(Dispersion d) {
  switch (d) {
    case Dispersion::equi:
      return "equi";
    case Dispersion::over:
      return "over";
    case Dispersion::under:
      return "under";
  }
  return "equi";
}

std::optional<Dispersion> dispersion_from_string(const std::string& text) {
  if (text == "equi") return Dispersion::equi;
  if (text == "over") return Dispersion::over;
  if (text == "under") return Dispersion::under;
  return std::nullopt;
}

TeamStrengths table1_strengths() {
  TeamStrengths t;
  t.attack_home = {0.50, 0.45, 0.40, 0.34, 0.29, 0.24, 0.18, 0.13, 0.08, 0.03,
                   -0.03, -0.08, -0.13, -0.18, -0.24, -0.29, -0.34, -0.40,
                   -0.45, -0.5};
  t.defense_home = {0.50, 0.45, 0.40, 0.34, 0.29, 0.24, 0.18, 0.13, 0.08, 0.03,
                    -0.03, -0.08, -0.13, -0.18, -0.24, -0.29, -0.34, -0.40,
                    -0.45, -0.5};
  t.attack_away = {0.42, 0.38, 0.34, 0.29, 0.25, -0.20, -0.16, -0.11, -0.07,
                   -0.02, 0.02, 0.07, 0.11, 0.16, 0.20, -0.25, -0.29, -0.34,
                   -0.38, -0.42};
  t.defense_away = {0.60, 0.54, 0.47, 0.41, 0.35, 0.28, 0.22, 0.16, 0.10, 0.03,
                    -0.03, -0.10, -0.16, -0.22, -0.28, -0.35, -0.41, -0.47,
                    -0.54, -0.60};
  return t;
}

std::array<double, kLeagueSize> shape_strengths() {
  std::array<double, kLeagueSize> g;
  const double step = 0.70 / (kLeagueSize - 1);
  for (int t = 0; t < kLeagueSize; ++t) g[t] = 0.35 - step * t;
  return g;
}

std::vector<std::string> league_team_names() {
  std::vector<std::string> names;
  names.reserve(kLeagueSize);
  for (int t = 1; t <= kLeagueSize; ++t) {
    names.push_back("Team" + std::string(t < 10 ? "0" : "") + std::to_string(t));
  }
  return names;
}

SyntheticLeague generate_seasons_detailed(const ScenarioSpec& spec) {
  if (spec.n_seasons < 1)
    throw std::invalid_argument("generate_seasons: n_seasons must be >= 1");
  const TeamStrengths strengths = table1_strengths();
  const std::array<double, kLeagueSize> shape = shape_strengths();
  const double gamma0 = spec.gamma_intercept();
  const std::vector<std::string> names = league_team_names();

  Rng rng = make_rng(spec.seed, 0x5e450);
  std::optional<dist::Mvn2> re_prior;
  if (spec.random_effect_cov) re_prior.emplace(*spec.random_effect_cov);

  const long games_per_season = kLeagueSize * (kLeagueSize - 1);
  const long total = games_per_season * spec.n_seasons;
  SyntheticLeague league;
  league.games.reserve(total);
  league.true_mu.resize(total, 2);
  league.true_nu.resize(total, 2);

  long id = 0;
  for (int season = 1; season <= spec.n_seasons; ++season) {
    std::vector<std::pair<int, int>> fixtures;
    fixtures.reserve(games_per_season);
    for (int h = 0; h < kLeagueSize; ++h)
      for (int a = 0; a < kLeagueSize; ++a)
        if (h != a) fixtures.emplace_back(h, a);
    std::shuffle(fixtures.begin(), fixtures.end(), rng);

    const std::string season_name =
        "S" + std::string(season < 10 ? "0" : "") + std::to_string(season);
    for (const auto& [h, a] : fixtures) {
      Eigen::Vector2d b = Eigen::Vector2d::Zero();
      if (re_prior) b = re_prior->sample(rng);
      // defense strengths enter the opponent's rate with a negative sign
      const double log_mu_home = spec.beta_h + strengths.attack_home[h] -
                                 strengths.defense_away[a] + b(0);
      const double log_mu_away = spec.beta_a + strengths.attack_away[a] -
                                 strengths.defense_home[h] + b(1);
      const double log_nu = gamma0 + shape[h] + shape[a];

      GameRecord g;
      g.game_id = id;
      g.season = season_name;
      g.home_team = names[h];
      g.away_team = names[a];
      g.phase = Phase::during;
      g.home_score = cmp::CmpSampler(log_mu_home, std::exp(log_nu)).draw(rng);
      g.away_score = cmp::CmpSampler(log_mu_away, std::exp(log_nu)).draw(rng);

      league.true_mu(id, 0) = std::exp(log_mu_home);
      league.true_mu(id, 1) = std::exp(log_mu_away);
      league.true_nu(id, 0) = std::exp(log_nu);
      league.true_nu(id, 1) = std::exp(log_nu);
      league.games.push_back(std::move(g));
      ++id;
    }
  }
  return league;
}

std::vector<GameRecord> generate_seasons(const ScenarioSpec& spec) {
  return generate_seasons_detailed(spec).games;
}

}  // namespace bicmp::sim
