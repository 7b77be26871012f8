#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bicmp/chain.hpp"
#include "bicmp/data.hpp"
#include "bicmp/design.hpp"

namespace bicmp::io {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run provenance stamped into every output file as leading '#' lines.
struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
};

std::string provenance_header(const Provenance& p);

// FNV-1a hash of the canonical config string, hex encoded.
std::string config_hash_hex(const std::string& canonical);

// Games CSV. Required columns (any order):
//   season,home_team,away_team,home_score,away_score,phase
// plus an optional leading game_id column. '#' lines are skipped. Malformed
// rows raise DataError naming the offending line.
std::vector<GameRecord> parse_games(const std::string& path);
std::vector<GameRecord> parse_games_stream(std::istream& in,
                                           const std::string& name);

void write_games_csv(const std::string& path,
                     const std::vector<GameRecord>& games,
                     const Provenance& provenance);

// Flat chain file: one row per retained draw, one column per scalar
// parameter (beta blocks, gamma blocks, d11/d12/d22, NB dispersions).
void write_chain_csv(const std::string& path, const mcmc::PosteriorDraws& draws,
                     const DesignBundle& design, const Provenance& provenance);

// Stored random-effect draws, columns b[i].home / b[i].away.
void write_random_effect_csv(const std::string& path,
                             const mcmc::PosteriorDraws& draws,
                             const Provenance& provenance);

// Sidecar mapping chain columns to design columns.
void write_column_map_csv(const std::string& path, mcmc::ModelKind kind,
                          const DesignBundle& design, bool shape_pinned,
                          const Provenance& provenance);

// Generic table writer (numeric matrix with a header row).
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& columns,
                     const Eigen::MatrixXd& data, const Provenance& provenance);

std::string format_double(double v, int precision = 9);

}  // namespace bicmp::io
