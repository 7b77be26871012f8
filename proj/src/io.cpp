#include "bicmp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bicmp/version.hpp"

namespace bicmp::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::int64_t parse_count(const std::string& text, const std::string& what,
                         long line_no) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size() || v < 0) throw std::invalid_argument("bad");
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": bad " + what +
                    " value '" + text + "'");
  }
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

std::string provenance_header(const Provenance& p) {
  std::ostringstream out;
  out << "# seed=" << p.seed << "\n";
  out << "# config_hash=" << p.config_hash << "\n";
  out << "# version=" << kVersion << "\n";
  return out.str();
}

std::string config_hash_hex(const std::string& canonical) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<GameRecord> parse_games(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_games_stream(in, path);
}

std::vector<GameRecord> parse_games_stream(std::istream& in,
                                           const std::string& name) {
  std::string line;
  long line_no = 0;

  // header (skipping provenance comments)
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw DataError(name + ": missing header row");

  std::unordered_map<std::string, int> col;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) col[header[i]] = i;
  for (const char* required : {"season", "home_team", "away_team", "home_score",
                               "away_score", "phase"}) {
    if (!col.count(required))
      throw DataError(name + ": missing column '" + std::string(required) + "'");
  }
  const bool has_id = col.count("game_id") > 0;

  std::vector<GameRecord> games;
  std::unordered_set<std::int64_t> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < header.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    GameRecord g;
    g.season = fields[col["season"]];
    g.home_team = fields[col["home_team"]];
    g.away_team = fields[col["away_team"]];
    g.home_score = parse_count(fields[col["home_score"]], "home_score", line_no);
    g.away_score = parse_count(fields[col["away_score"]], "away_score", line_no);
    const std::string phase_text = fields[col["phase"]];
    const auto phase = phase_from_string(phase_text);
    if (!phase)
      throw DataError("line " + std::to_string(line_no) + ": unknown phase '" +
                      phase_text + "' (expected before/during/after)");
    g.phase = *phase;
    if (g.home_team.empty() || g.away_team.empty())
      throw DataError("line " + std::to_string(line_no) + ": empty team id");
    if (g.home_team == g.away_team)
      throw DataError("line " + std::to_string(line_no) +
                      ": home and away team coincide");
    if (has_id) {
      g.game_id = parse_count(fields[col["game_id"]], "game_id", line_no);
      if (!seen_ids.insert(g.game_id).second)
        throw DataError("line " + std::to_string(line_no) + ": duplicate game id " +
                        std::to_string(g.game_id));
    } else {
      g.game_id = static_cast<std::int64_t>(games.size());
    }
    games.push_back(std::move(g));
  }
  return games;
}

void write_games_csv(const std::string& path,
                     const std::vector<GameRecord>& games,
                     const Provenance& provenance) {
  auto out = open_for_write(path);
  out << provenance_header(provenance);
  out << "season,home_team,away_team,home_score,away_score,phase\n";
  for (const auto& g : games) {
    out << g.season << ',' << g.home_team << ',' << g.away_team << ','
        << g.home_score << ',' << g.away_score << ',' << to_string(g.phase)
        << '\n';
  }
}

void write_chain_csv(const std::string& path, const mcmc::PosteriorDraws& draws,
                     const DesignBundle& design, const Provenance& provenance) {
  auto out = open_for_write(path);
  out << provenance_header(provenance);
  const auto names =
      mcmc::chain_column_names(draws.kind, design, draws.shape_pinned);
  for (size_t c = 0; c < names.size(); ++c)
    out << names[c] << (c + 1 < names.size() ? ',' : '\n');
  const long n = draws.n_draws();
  const int p = static_cast<int>(draws.beta_home.cols());
  for (long r = 0; r < n; ++r) {
    for (int c = 0; c < p; ++c) out << format_double(draws.beta_home(r, c)) << ',';
    for (int c = 0; c < p; ++c) out << format_double(draws.beta_away(r, c)) << ',';
    if (draws.has_gamma()) {
      for (int c = 0; c < p; ++c) out << format_double(draws.gamma_home(r, c)) << ',';
      for (int c = 0; c < p; ++c) out << format_double(draws.gamma_away(r, c)) << ',';
    }
    out << format_double(draws.cov_entries(r, 0)) << ','
        << format_double(draws.cov_entries(r, 1)) << ','
        << format_double(draws.cov_entries(r, 2));
    if (draws.nb_dispersion.size() > 0) {
      out << ',' << format_double(draws.nb_dispersion(r, 0)) << ','
          << format_double(draws.nb_dispersion(r, 1));
    }
    out << '\n';
  }
}

void write_random_effect_csv(const std::string& path,
                             const mcmc::PosteriorDraws& draws,
                             const Provenance& provenance) {
  auto out = open_for_write(path);
  out << provenance_header(provenance);
  const long n2 = draws.random_effects.cols();
  out << "retained_draw";
  for (long c = 0; c < n2; c += 2)
    out << ",b[" << c / 2 << "].home,b[" << c / 2 << "].away";
  out << '\n';
  for (long r = 0; r < draws.random_effects.rows(); ++r) {
    out << draws.random_effect_rows[r];
    for (long c = 0; c < n2; ++c)
      out << ',' << format_double(draws.random_effects(r, c));
    out << '\n';
  }
}

void write_column_map_csv(const std::string& path, mcmc::ModelKind kind,
                          const DesignBundle& design, bool shape_pinned,
                          const Provenance& provenance) {
  auto out = open_for_write(path);
  out << provenance_header(provenance);
  out << "chain_column,design_column\n";
  const auto names = mcmc::chain_column_names(kind, design, shape_pinned);
  const int p = design.n_cols();
  for (const auto& name : names) {
    const auto bracket = name.find('[');
    std::string design_name = "-";
    if (bracket != std::string::npos && name.back() == ']') {
      const int idx = std::stoi(name.substr(bracket + 1,
                                            name.size() - bracket - 2));
      if (idx >= 0 && idx < p &&
          (name.rfind("beta_", 0) == 0 || name.rfind("gamma_", 0) == 0))
        design_name = design.column_names[idx];
    } else if (name == "d11" || name == "d12" || name == "d22") {
      design_name = "random_effect_cov";
    } else if (name.rfind("kappa_", 0) == 0) {
      design_name = "nb_dispersion";
    }
    out << name << ',' << design_name << '\n';
  }
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& columns,
                     const Eigen::MatrixXd& data, const Provenance& provenance) {
  if (static_cast<long>(columns.size()) != data.cols())
    throw std::invalid_argument("write_table_csv: column count mismatch");
  auto out = open_for_write(path);
  out << provenance_header(provenance);
  for (size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? ',' : '\n');
  for (long r = 0; r < data.rows(); ++r) {
    for (long c = 0; c < data.cols(); ++c)
      out << format_double(data(r, c)) << (c + 1 < data.cols() ? ',' : '\n');
  }
}

}  // namespace bicmp::io
