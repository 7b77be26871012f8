#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bicmp/data.hpp"

namespace bicmp::sim {

inline constexpr int kLeagueSize = 20;

enum class Dispersion { equi, over, under };

std::string to_string(Dispersion d);
std::optional<Dispersion> dispersion_from_string(const std::string& text);

// Synthetic-league scenario: 20 teams, full double round robin per season,
// true home advantage beta_h - beta_a. The dispersion level sets the shape
// intercepts: equi -> 0, over -> -0.5, under -> +0.5. Absent random_effect_cov
// means b = 0 in generation.
struct ScenarioSpec {
  Dispersion dispersion = Dispersion::equi;
  int n_seasons = 1;
  std::uint64_t seed = 1;
  double beta_h = 0.6;
  double beta_a = 0.1;
  std::optional<Eigen::Matrix2d> random_effect_cov;

  double gamma_intercept() const {
    switch (dispersion) {
      case Dispersion::equi:
        return 0.0;
      case Dispersion::over:
        return -0.5;
      case Dispersion::under:
        return 0.5;
    }
    return 0.0;
  }
};

// Per-team strengths of the simulated league. The values are printed as
// strengths: a defense strength *reduces* the opponent's scoring rate, so the
// generating predictors subtract the conceding side's defense entry.
struct TeamStrengths {
  std::array<double, kLeagueSize> attack_home;
  std::array<double, kLeagueSize> defense_home;
  std::array<double, kLeagueSize> attack_away;
  std::array<double, kLeagueSize> defense_away;
};

TeamStrengths table1_strengths();

// Shape-effect ladder, 0.35 down to -0.35 in equal steps, applied with the
// same per-team value to the attack and defense shape roles.
std::array<double, kLeagueSize> shape_strengths();

std::vector<std::string> league_team_names();

struct SyntheticLeague {
  std::vector<GameRecord> games;
  Eigen::MatrixXd true_mu;  // n x 2, random effect included when drawn
  Eigen::MatrixXd true_nu;  // n x 2
};

// n_seasons x 380 games (every ordered pair once per season, order shuffled
// deterministically), scores drawn exactly from the CMP law at the scenario's
// true parameters. All phases are 'during'.
SyntheticLeague generate_seasons_detailed(const ScenarioSpec& spec);
std::vector<GameRecord> generate_seasons(const ScenarioSpec& spec);

}  // namespace bicmp::sim
