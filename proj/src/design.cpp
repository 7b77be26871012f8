#include "bicmp/design.hpp"

namespace bicmp {

namespace {

// Sum-to-zero coding: team t < T-1 gets +1 in its own column, team T-1 gets
// -1 in every free column of the block.
void set_team_block(Eigen::MatrixXd& row_target, long row, int block_begin,
                    int n_free, int team) {
  if (team < n_free) {
    row_target(row, block_begin + team) = 1.0;
  } else {
    for (int c = 0; c < n_free; ++c) row_target(row, block_begin + c) = -1.0;
  }
}

}  // namespace

DesignBundle build_design(const std::vector<GameRecord>& games,
                          const TeamRoster& roster) {
  if (games.empty()) throw std::invalid_argument("build_design: no games");
  validate_games(games);

  const int n_teams = roster.size();
  const int n_free = n_teams - 1;
  const int p = 2 * n_teams + 1;
  const long n = static_cast<long>(games.size());

  DesignBundle d{Eigen::MatrixXd::Zero(n, p), Eigen::MatrixXd::Zero(n, p),
                 {},        roster,
                 0,         1,
                 1 + n_free, n_free,
                 2 * n_teams - 1, 2 * n_teams};

  d.column_names.reserve(p);
  d.column_names.push_back("intercept");
  for (int t = 0; t < n_free; ++t)
    d.column_names.push_back("attack[" + roster.name(t) + "]");
  for (int t = 0; t < n_free; ++t)
    d.column_names.push_back("defense[" + roster.name(t) + "]");
  d.column_names.push_back("phase_before");
  d.column_names.push_back("phase_after");

  for (long i = 0; i < n; ++i) {
    const auto& g = games[i];
    const int h = roster.index_of(g.home_team);
    const int a = roster.index_of(g.away_team);

    d.home(i, d.intercept_col) = 1.0;
    d.away(i, d.intercept_col) = 1.0;
    // scoring side attacks, conceding side defends
    set_team_block(d.home, i, d.attack_begin, n_free, h);
    set_team_block(d.home, i, d.defense_begin, n_free, a);
    set_team_block(d.away, i, d.attack_begin, n_free, a);
    set_team_block(d.away, i, d.defense_begin, n_free, h);

    if (g.phase == Phase::before) {
      d.home(i, d.phase_before_col) = 1.0;
      d.away(i, d.phase_before_col) = 1.0;
    } else if (g.phase == Phase::after) {
      d.home(i, d.phase_after_col) = 1.0;
      d.away(i, d.phase_after_col) = 1.0;
    }
  }
  return d;
}

Eigen::VectorXd expand_team_effects(const Eigen::VectorXd& coefficients,
                                    const DesignBundle& design, bool attack) {
  const int n_free = design.n_free_team_cols;
  const int begin = attack ? design.attack_begin : design.defense_begin;
  if (coefficients.size() < begin + n_free)
    throw std::invalid_argument("expand_team_effects: coefficient vector too short");
  Eigen::VectorXd effects(n_free + 1);
  effects.head(n_free) = coefficients.segment(begin, n_free);
  effects(n_free) = -effects.head(n_free).sum();
  return effects;
}

}  // namespace bicmp
