#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bicmp/data.hpp"

namespace bicmp {

// Fixed-effect design for the four linear predictors. The home- and away-
// outcome predictors for the centering (mu) and shape (nu) families share the
// same incidence structure, so one matrix per outcome suffices: mu rows add a
// game random effect on top, nu rows do not.
//
// Column layout (p = 2T + 1 for T teams):
//   [0]                intercept
//   [1 .. T-1]         attack effects, sum-to-zero coded (last team implied)
//   [T .. 2T-2]        defense effects, sum-to-zero coded
//   [2T-1]             phase offset: before  (reference level = during)
//   [2T]               phase offset: after
struct DesignBundle {
  Eigen::MatrixXd home;  // n x p, scoring team = home side
  Eigen::MatrixXd away;  // n x p, scoring team = away side
  std::vector<std::string> column_names;
  TeamRoster roster;
  int intercept_col = 0;
  int attack_begin = 1;
  int defense_begin = 0;
  int n_free_team_cols = 0;  // T - 1
  int phase_before_col = 0;
  int phase_after_col = 0;

  long n_games() const { return home.rows(); }
  int n_cols() const { return static_cast<int>(home.cols()); }
  const Eigen::MatrixXd& outcome(int j) const { return j == 0 ? home : away; }
};

DesignBundle build_design(const std::vector<GameRecord>& games,
                          const TeamRoster& roster);

// Full per-team effect vector (length T) from the T-1 free coefficients; the
// last team's effect is minus the sum of the others.
Eigen::VectorXd expand_team_effects(const Eigen::VectorXd& coefficients,
                                    const DesignBundle& design, bool attack);

}  // namespace bicmp
