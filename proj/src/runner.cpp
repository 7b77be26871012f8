#include "bicmp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>

namespace bicmp::run {

namespace {

using mcmc::ModelKind;
using mcmc::PosteriorDraws;

Eigen::MatrixXd scalar_columns(const PosteriorDraws& d) {
  const long n = d.n_draws();
  long cols = d.beta_home.cols() * 2 + 3;
  if (d.has_gamma()) cols += d.gamma_home.cols() * 2;
  if (d.nb_dispersion.size() > 0) cols += 2;
  Eigen::MatrixXd m(n, cols);
  long at = 0;
  m.middleCols(at, d.beta_home.cols()) = d.beta_home;
  at += d.beta_home.cols();
  m.middleCols(at, d.beta_away.cols()) = d.beta_away;
  at += d.beta_away.cols();
  if (d.has_gamma()) {
    m.middleCols(at, d.gamma_home.cols()) = d.gamma_home;
    at += d.gamma_home.cols();
    m.middleCols(at, d.gamma_away.cols()) = d.gamma_away;
    at += d.gamma_away.cols();
  }
  m.middleCols(at, 3) = d.cov_entries;
  at += 3;
  if (d.nb_dispersion.size() > 0) m.middleCols(at, 2) = d.nb_dispersion;
  return m;
}

double mean_of(const Eigen::VectorXd& v) { return v.mean(); }

double sd_of(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / (v.size() - 1));
}

}  // namespace

Eigen::VectorXd quantiles(Eigen::VectorXd values,
                          const std::vector<double>& probs) {
  std::sort(values.data(), values.data() + values.size());
  Eigen::VectorXd out(static_cast<long>(probs.size()));
  const long n = values.size();
  for (size_t k = 0; k < probs.size(); ++k) {
    const double h = probs[k] * (n - 1);
    const long lo = static_cast<long>(std::floor(h));
    const long hi = std::min(lo + 1, n - 1);
    const double frac = h - lo;
    out(static_cast<long>(k)) = values(lo) + frac * (values(hi) - values(lo));
  }
  return out;
}

PosteriorDraws pool_draws(const std::vector<PosteriorDraws>& chains) {
  if (chains.empty()) throw std::invalid_argument("pool_draws: no chains");
  PosteriorDraws pooled = chains[0];
  for (size_t c = 1; c < chains.size(); ++c) {
    const PosteriorDraws& d = chains[c];
    const long off = pooled.n_draws();
    auto append = [](Eigen::MatrixXd& dst, const Eigen::MatrixXd& src) {
      if (src.size() == 0) return;
      const long r0 = dst.rows();
      dst.conservativeResize(r0 + src.rows(), src.cols());
      dst.bottomRows(src.rows()) = src;
    };
    append(pooled.beta_home, d.beta_home);
    append(pooled.beta_away, d.beta_away);
    append(pooled.gamma_home, d.gamma_home);
    append(pooled.gamma_away, d.gamma_away);
    append(pooled.cov_entries, d.cov_entries);
    append(pooled.nb_dispersion, d.nb_dispersion);
    const long b0 = pooled.random_effects.rows();
    append(pooled.random_effects, d.random_effects);
    for (long row : d.random_effect_rows)
      pooled.random_effect_rows.push_back(row + off);
    (void)b0;
  }
  return pooled;
}

FitResult run_fit(const std::vector<GameRecord>& games,
                  const DesignBundle& design, const FitOptions& options) {
  FitResult result;
  result.chains = mcmc::run_chains(options.kind, games, design, options.priors,
                                   options.chain);
  const PosteriorDraws pooled = pool_draws(result.chains);

  // HA functionals and their exceedance probabilities
  result.ha = ha_functionals(pooled.beta_home, pooled.beta_away, design);
  const long n_draws = result.ha.during.size();
  long lt_before = 0, lt_after = 0;
  for (long r = 0; r < n_draws; ++r) {
    if (result.ha.during(r) < result.ha.before(r)) ++lt_before;
    if (result.ha.during(r) < result.ha.after(r)) ++lt_after;
  }
  result.p_ha_during_lt_before = static_cast<double>(lt_before) / n_draws;
  result.p_ha_during_lt_after = static_cast<double>(lt_after) / n_draws;

  // per-parameter summaries
  const auto names =
      mcmc::chain_column_names(pooled.kind, design, pooled.shape_pinned);
  const Eigen::MatrixXd pooled_cols = scalar_columns(pooled);
  std::vector<Eigen::MatrixXd> chain_cols;
  chain_cols.reserve(result.chains.size());
  for (const auto& c : result.chains) chain_cols.push_back(scalar_columns(c));

  const std::vector<double> probs{0.025, 0.5, 0.975};
  auto summarize = [&](const std::string& name, long col,
                       const std::vector<Eigen::MatrixXd>& per_chain,
                       const Eigen::VectorXd& pooled_values) {
    ParameterSummary s;
    s.name = name;
    s.mean = mean_of(pooled_values);
    s.sd = sd_of(pooled_values);
    const Eigen::VectorXd q = quantiles(pooled_values, probs);
    s.q025 = q(0);
    s.q50 = q(1);
    s.q975 = q(2);
    double ess_total = 0.0;
    for (const auto& m : per_chain) ess_total += diag::ess(m.col(col));
    s.ess = ess_total;
    if (per_chain.size() >= 2) {
      std::vector<Eigen::VectorXd> scalar_chains;
      for (const auto& m : per_chain) scalar_chains.push_back(m.col(col));
      s.psrf = diag::psrf_scalar(scalar_chains);
    } else {
      s.psrf = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
  };
  for (size_t c = 0; c < names.size(); ++c)
    result.summaries.push_back(
        summarize(names[c], static_cast<long>(c), chain_cols,
                  pooled_cols.col(static_cast<long>(c))));

  // HA rows reuse the same summary machinery via per-chain HA draws
  std::vector<Eigen::MatrixXd> ha_chain_cols;
  for (const auto& c : result.chains) {
    const HaDraws ha_c = ha_functionals(c.beta_home, c.beta_away, design);
    Eigen::MatrixXd m(ha_c.during.size(), 3);
    m.col(0) = ha_c.before;
    m.col(1) = ha_c.during;
    m.col(2) = ha_c.after;
    ha_chain_cols.push_back(std::move(m));
  }
  Eigen::MatrixXd ha_pooled(result.ha.during.size(), 3);
  ha_pooled.col(0) = result.ha.before;
  ha_pooled.col(1) = result.ha.during;
  ha_pooled.col(2) = result.ha.after;
  const char* ha_names[3] = {"ha_before", "ha_during", "ha_after"};
  for (long c = 0; c < 3; ++c)
    result.summaries.push_back(
        summarize(ha_names[c], c, ha_chain_cols, ha_pooled.col(c)));

  // multivariate PSRF per block
  if (result.chains.size() >= 2) {
    auto block_psrf = [&](const std::string& name,
                          auto block_of) {
      std::vector<Eigen::MatrixXd> blocks;
      for (const auto& c : result.chains) blocks.push_back(block_of(c));
      result.block_psrf[name] = diag::psrf(blocks);
    };
    block_psrf("beta_home", [](const PosteriorDraws& c) { return c.beta_home; });
    block_psrf("beta_away", [](const PosteriorDraws& c) { return c.beta_away; });
    if (pooled.has_gamma()) {
      block_psrf("gamma_home",
                 [](const PosteriorDraws& c) { return c.gamma_home; });
      block_psrf("gamma_away",
                 [](const PosteriorDraws& c) { return c.gamma_away; });
    }
  }

  // acceptance rates averaged over chains
  for (const auto& [key, rate] : result.chains[0].acceptance_rates) {
    double total = 0.0;
    for (const auto& c : result.chains) total += c.acceptance_rates.at(key);
    result.acceptance_rates[key] = total / result.chains.size();
  }

  if (options.compute_dic) {
    if (options.kind == ModelKind::cmp && !options.chain.pin_shape_to_poisson) {
      result.dic = diag::dic_cmp(pooled, games, design, options.dic_r,
                                 options.dic_samples, options.chain.seed);
    } else {
      const ModelKind lik = options.kind == ModelKind::cmp
                                ? ModelKind::poisson
                                : options.kind;
      result.dic = diag::dic_exact(pooled, games, design, lik);
    }
    result.has_dic = true;
  }

  if (options.compute_predictive) {
    result.predictive = diag::posterior_predictive(
        pooled, design, options.chain.seed, options.predictive_replicates);
    const long len_h = result.predictive.expected_home.size();
    const long len_a = result.predictive.expected_away.size();
    const Eigen::VectorXd obs_h = diag::count_frequencies(games, 0, len_h);
    const Eigen::VectorXd obs_a = diag::count_frequencies(games, 1, len_a);
    Eigen::VectorXd exp_h = Eigen::VectorXd::Zero(obs_h.size());
    exp_h.head(len_h) = result.predictive.expected_home;
    Eigen::VectorXd exp_a = Eigen::VectorXd::Zero(obs_a.size());
    exp_a.head(len_a) = result.predictive.expected_away;
    result.rootogram_home = diag::rootogram_data(obs_h, exp_h);
    result.rootogram_away = diag::rootogram_data(obs_a, exp_a);
  }
  return result;
}

namespace {

void write_summary_txt(const FitResult& result, const FitOptions& options,
                       const std::string& path, const io::Provenance& prov) {
  std::ofstream out(path);
  if (!out) throw io::DataError("cannot open '" + path + "' for writing");
  out << io::provenance_header(prov);
  out << "[run]\n";
  out << "model: " << mcmc::to_string(options.kind) << "\n";
  out << "chains: " << options.chain.n_chains << "\n";
  out << "iterations: " << options.chain.n_iterations << "\n";
  out << "burn_in: " << options.chain.burn_in << "\n";
  out << "thin: " << options.chain.thin << "\n";
  out << "target_acceptance: " << io::format_double(options.chain.target_acceptance, 6)
      << "\n";
  out << "seed: " << options.chain.seed << "\n";
  out << "\n[priors]\n";
  out << "beta_mean: " << io::format_double(options.priors.beta_mean, 6) << "\n";
  out << "beta_precision: " << io::format_double(options.priors.beta_precision, 6)
      << "\n";
  out << "gamma_mean: " << io::format_double(options.priors.gamma_mean, 6) << "\n";
  out << "gamma_precision: "
      << io::format_double(options.priors.gamma_precision, 6) << "\n";
  out << "wishart_df: " << io::format_double(options.priors.wishart_df, 6) << "\n";
  out << "wishart_scale_11: "
      << io::format_double(options.priors.wishart_scale(0, 0), 6) << "\n";
  out << "wishart_scale_12: "
      << io::format_double(options.priors.wishart_scale(0, 1), 6) << "\n";
  out << "wishart_scale_22: "
      << io::format_double(options.priors.wishart_scale(1, 1), 6) << "\n";
  out << "\n[acceptance]\n";
  for (const auto& [key, rate] : result.acceptance_rates)
    out << key << ": " << io::format_double(rate, 6) << "\n";
  out << "\n[home_advantage]\n";
  for (const auto& s : result.summaries) {
    if (s.name.rfind("ha_", 0) != 0) continue;
    out << s.name << "_mean: " << io::format_double(s.mean, 6) << "\n";
    out << s.name << "_sd: " << io::format_double(s.sd, 6) << "\n";
    out << s.name << "_q025: " << io::format_double(s.q025, 6) << "\n";
    out << s.name << "_q50: " << io::format_double(s.q50, 6) << "\n";
    out << s.name << "_q975: " << io::format_double(s.q975, 6) << "\n";
  }
  out << "p_ha_during_lt_before: "
      << io::format_double(result.p_ha_during_lt_before, 6) << "\n";
  out << "p_ha_during_lt_after: "
      << io::format_double(result.p_ha_during_lt_after, 6) << "\n";
  if (result.has_dic) {
    out << "\n[dic]\n";
    const char* outcome_name[2] = {"y1", "y2"};
    for (int j = 0; j < 2; ++j) {
      const auto& rep = result.dic[j];
      out << outcome_name[j] << "_dic: " << io::format_double(rep.dic, 8) << "\n";
      out << outcome_name[j]
          << "_mean_deviance: " << io::format_double(rep.mean_deviance, 8) << "\n";
      out << outcome_name[j] << "_effective_parameters: "
          << io::format_double(rep.effective_parameters, 8) << "\n";
      out << outcome_name[j] << "_estimator: "
          << (rep.estimator == diag::DicReport::Estimator::exact
                  ? "exact"
                  : "unbiased_rejection")
          << "\n";
    }
  }
  if (!result.block_psrf.empty()) {
    out << "\n[convergence]\n";
    for (const auto& [key, value] : result.block_psrf)
      out << "psrf_" << key << ": " << io::format_double(value, 6) << "\n";
  }
}

}  // namespace

void write_fit_outputs(const FitResult& result, const DesignBundle& design,
                       const FitOptions& options, const std::string& outdir,
                       const io::Provenance& prov) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  const std::string model = mcmc::to_string(options.kind);
  const std::string base = outdir + "/";

  for (const auto& chain : result.chains) {
    const std::string tag = model + "_c" + std::to_string(chain.chain_id);
    io::write_chain_csv(base + "chain_" + tag + ".csv", chain, design, prov);
    io::write_random_effect_csv(base + "b_chain_" + tag + ".csv", chain, prov);
  }
  io::write_column_map_csv(base + "columns_" + model + ".csv",
                           result.chains[0].kind, design,
                           result.chains[0].shape_pinned, prov);

  {
    Eigen::MatrixXd table(static_cast<long>(result.summaries.size()), 7);
    std::vector<std::string> row_names;
    for (size_t r = 0; r < result.summaries.size(); ++r) {
      const auto& s = result.summaries[r];
      row_names.push_back(s.name);
      table.row(static_cast<long>(r)) << s.mean, s.sd, s.q025, s.q50, s.q975,
          s.ess, s.psrf;
    }
    std::ofstream out(base + "params_" + model + ".csv");
    if (!out) throw io::DataError("cannot write params table");
    out << io::provenance_header(prov);
    out << "parameter,mean,sd,q025,q50,q975,ess,psrf\n";
    for (size_t r = 0; r < result.summaries.size(); ++r) {
      out << row_names[r];
      for (long c = 0; c < 7; ++c)
        out << ',' << io::format_double(table(static_cast<long>(r), c), 8);
      out << '\n';
    }
  }

  {
    Eigen::MatrixXd ha(result.ha.during.size(), 3);
    ha.col(0) = result.ha.before;
    ha.col(1) = result.ha.during;
    ha.col(2) = result.ha.after;
    io::write_table_csv(base + "ha_draws_" + model + ".csv",
                        {"ha_before", "ha_during", "ha_after"}, ha, prov);
  }

  if (result.has_dic) {
    std::ofstream out(base + "dic_" + model + ".csv");
    if (!out) throw io::DataError("cannot write dic table");
    out << io::provenance_header(prov);
    out << "outcome,estimator,mean_deviance,deviance_at_mean,effective_parameters,"
           "dic,n_samples\n";
    const char* outcome_name[2] = {"y1", "y2"};
    for (int j = 0; j < 2; ++j) {
      const auto& rep = result.dic[j];
      out << outcome_name[j] << ','
          << (rep.estimator == diag::DicReport::Estimator::exact
                  ? "exact"
                  : "unbiased_rejection")
          << ',' << io::format_double(rep.mean_deviance, 10) << ','
          << io::format_double(rep.deviance_at_mean, 10) << ','
          << io::format_double(rep.effective_parameters, 10) << ','
          << io::format_double(rep.dic, 10) << ','
          << rep.n_posterior_samples_used << '\n';
    }
  }

  if (options.compute_predictive) {
    const long len = std::max(result.predictive.expected_home.size(),
                              result.predictive.expected_away.size());
    Eigen::MatrixXd pred = Eigen::MatrixXd::Zero(len, 3);
    for (long k = 0; k < len; ++k) {
      pred(k, 0) = static_cast<double>(k);
      if (k < result.predictive.expected_home.size())
        pred(k, 1) = result.predictive.expected_home(k);
      if (k < result.predictive.expected_away.size())
        pred(k, 2) = result.predictive.expected_away(k);
    }
    io::write_table_csv(base + "predictive_" + model + ".csv",
                        {"count", "expected_home", "expected_away"}, pred, prov);

    auto write_rootogram = [&](const std::vector<diag::RootogramRow>& rows,
                               const std::string& path) {
      Eigen::MatrixXd table(static_cast<long>(rows.size()), 3);
      for (size_t r = 0; r < rows.size(); ++r)
        table.row(static_cast<long>(r)) << static_cast<double>(rows[r].count),
            rows[r].sqrt_expected, rows[r].bar_bottom;
      io::write_table_csv(path, {"count", "sqrt_expected", "bar_bottom"}, table,
                          prov);
    };
    write_rootogram(result.rootogram_home,
                    base + "rootogram_" + model + "_home.csv");
    write_rootogram(result.rootogram_away,
                    base + "rootogram_" + model + "_away.csv");
  }

  write_summary_txt(result, options, base + "summary_" + model + ".txt", prov);
}

CompareResult run_compare(const CompareOptions& options) {
  if (options.replicates < 1)
    throw std::invalid_argument("run_compare: replicates must be >= 1");
  CompareResult result;
  result.replicates = options.replicates;
  result.per_replicate.resize(options.replicates, 6);

  for (int r = 0; r < options.replicates; ++r) {
    sim::ScenarioSpec spec = options.scenario;
    spec.seed = options.scenario.seed + 1000003ULL * static_cast<std::uint64_t>(r);
    const auto games = sim::generate_seasons(spec);
    const TeamRoster roster = TeamRoster::from_games(games);
    const DesignBundle design = build_design(games, roster);

    const ModelKind kinds[3] = {ModelKind::cmp, ModelKind::poisson,
                                ModelKind::negative_binomial};
    for (int k = 0; k < 3; ++k) {
      mcmc::ChainConfig cfg = options.chain;
      cfg.seed = spec.seed + 17ULL * (k + 1);
      cfg.n_chains = 1;
      const PosteriorDraws draws =
          mcmc::run_chain(kinds[k], games, design, options.priors, cfg);
      std::array<diag::DicReport, 2> dic;
      if (kinds[k] == ModelKind::cmp) {
        dic = diag::dic_cmp(draws, games, design, options.dic_r,
                            options.dic_samples, cfg.seed);
      } else {
        dic = diag::dic_exact(draws, games, design, kinds[k]);
      }
      result.per_replicate(r, 2 * k) = dic[0].dic;
      result.per_replicate(r, 2 * k + 1) = dic[1].dic;
    }
  }

  const char* model_names[3] = {"cmp", "poisson", "nb"};
  for (int k = 0; k < 3; ++k) {
    CompareResult::Row row;
    row.model = model_names[k];
    row.y1_mean = mean_of(result.per_replicate.col(2 * k));
    row.y1_sd = sd_of(result.per_replicate.col(2 * k));
    row.y2_mean = mean_of(result.per_replicate.col(2 * k + 1));
    row.y2_sd = sd_of(result.per_replicate.col(2 * k + 1));
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_compare_outputs(const CompareResult& result,
                           const CompareOptions& options,
                           const std::string& outdir,
                           const io::Provenance& prov) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  {
    std::ofstream out(outdir + "/dic_table.csv");
    if (!out) throw io::DataError("cannot write dic_table.csv");
    out << io::provenance_header(prov);
    out << "scenario,seasons,replicates,model,y1_mean,y1_sd,y2_mean,y2_sd\n";
    for (const auto& row : result.rows) {
      out << sim::to_string(options.scenario.dispersion) << ','
          << options.scenario.n_seasons << ',' << result.replicates << ','
          << row.model << ',' << io::format_double(row.y1_mean, 8) << ','
          << io::format_double(row.y1_sd, 8) << ','
          << io::format_double(row.y2_mean, 8) << ','
          << io::format_double(row.y2_sd, 8) << '\n';
    }
  }
  {
    std::ofstream out(outdir + "/dic_table.txt");
    if (!out) throw io::DataError("cannot write dic_table.txt");
    out << io::provenance_header(prov);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-6s %-8s %20s %20s\n", "Data", "Model",
                  "y1 Mean (SD)", "y2 Mean (SD)");
    out << buf;
    for (const auto& row : result.rows) {
      char y1[48], y2[48];
      std::snprintf(y1, sizeof(y1), "%.2f (%.2f)", row.y1_mean, row.y1_sd);
      std::snprintf(y2, sizeof(y2), "%.2f (%.2f)", row.y2_mean, row.y2_sd);
      std::snprintf(buf, sizeof(buf), "%-6s %-8s %20s %20s\n",
                    sim::to_string(options.scenario.dispersion).c_str(),
                    row.model.c_str(), y1, y2);
      out << buf;
    }
  }
  {
    std::ofstream out(outdir + "/dic_replicates.csv");
    if (!out) throw io::DataError("cannot write dic_replicates.csv");
    out << io::provenance_header(prov);
    out << "replicate,cmp_y1,cmp_y2,poisson_y1,poisson_y2,nb_y1,nb_y2\n";
    for (long r = 0; r < result.per_replicate.rows(); ++r) {
      out << r;
      for (long c : {0L, 1L, 2L, 3L, 4L, 5L})
        out << ',' << io::format_double(result.per_replicate(r, c), 8);
      out << '\n';
    }
  }
}

std::vector<std::pair<std::string, PriorSpec>> sensitivity_scenarios() {
  std::vector<std::pair<std::string, PriorSpec>> scenarios;
  const double precisions[4] = {0.1, 1.0, 3.0, 10.0};
  const double dfs[4] = {30.0, 10.0, 10.0, 5.0};
  const double scales[4] = {1.0, 1.0, 0.1, 0.1};
  const char* names[4] = {"A", "B", "C", "D"};
  for (int s = 0; s < 4; ++s) {
    PriorSpec prior;
    prior.beta_precision = precisions[s];
    prior.gamma_precision = precisions[s];
    prior.wishart_df = dfs[s];
    prior.wishart_scale = scales[s] * Eigen::Matrix2d::Identity();
    scenarios.emplace_back(names[s], prior);
  }
  return scenarios;
}

SensitivityResult run_sensitivity(const SensitivityOptions& options) {
  sim::ScenarioSpec spec;
  spec.dispersion = sim::Dispersion::over;
  spec.n_seasons = options.n_seasons;
  spec.seed = options.seed;
  spec.beta_h = options.beta_h;
  spec.beta_a = options.beta_a;
  const sim::SyntheticLeague league = sim::generate_seasons_detailed(spec);
  const TeamRoster roster = TeamRoster::from_games(league.games);
  const DesignBundle design = build_design(league.games, roster);
  const long n = design.n_games();

  SensitivityResult result;
  for (const auto& [name, priors] : sensitivity_scenarios()) {
    mcmc::ChainConfig cfg = options.chain;
    cfg.seed = options.seed + 7919ULL * (result.scenarios.size() + 1);
    const auto chains =
        mcmc::run_chains(ModelKind::cmp, league.games, design, priors, cfg);

    SensitivityResult::Scenario scenario;
    scenario.name = name;

    // posterior mean of mu per game/outcome over stored random-effect rows
    Eigen::MatrixXd mu_hat = Eigen::MatrixXd::Zero(n, 2);
    long used = 0;
    for (const auto& chain : chains) {
      for (size_t k = 0; k < chain.random_effect_rows.size(); ++k) {
        const long row = chain.random_effect_rows[k];
        const Eigen::VectorXd fe_h =
            design.home * chain.beta_home.row(row).transpose();
        const Eigen::VectorXd fe_a =
            design.away * chain.beta_away.row(row).transpose();
        for (long i = 0; i < n; ++i) {
          mu_hat(i, 0) += std::exp(fe_h(i) + chain.random_effects(k, 2 * i));
          mu_hat(i, 1) += std::exp(fe_a(i) + chain.random_effects(k, 2 * i + 1));
        }
        ++used;
      }
    }
    mu_hat /= static_cast<double>(used);
    for (int j = 0; j < 2; ++j)
      scenario.mse_mu[j] =
          (mu_hat.col(j) - league.true_mu.col(j)).squaredNorm() / n;

    for (int j = 0; j < 2; ++j) {
      std::vector<Eigen::MatrixXd> beta_blocks, gamma_blocks;
      for (const auto& chain : chains) {
        beta_blocks.push_back(chain.beta(j));
        gamma_blocks.push_back(chain.gamma(j));
      }
      scenario.psrf_beta[j] = diag::psrf(beta_blocks);
      scenario.psrf_gamma[j] = diag::psrf(gamma_blocks);

      auto mean_ess = [&](auto accessor) {
        const long dim = accessor(chains[0]).cols();
        double total = 0.0;
        for (long c = 0; c < dim; ++c) {
          double comp = 0.0;
          for (const auto& chain : chains) comp += diag::ess(accessor(chain).col(c));
          total += comp;
        }
        return total / static_cast<double>(dim);
      };
      scenario.ess_beta[j] = mean_ess(
          [j](const PosteriorDraws& c) -> const Eigen::MatrixXd& { return c.beta(j); });
      scenario.ess_gamma[j] = mean_ess(
          [j](const PosteriorDraws& c) -> const Eigen::MatrixXd& { return c.gamma(j); });

      // random effects: max univariate PSRF and mean ESS over components
      double max_psrf = 0.0;
      double total_ess = 0.0;
      for (long i = 0; i < n; ++i) {
        std::vector<Eigen::VectorXd> comp_chains;
        double comp_ess = 0.0;
        for (const auto& chain : chains) {
          comp_chains.push_back(chain.random_effects.col(2 * i + j));
          comp_ess += diag::ess(chain.random_effects.col(2 * i + j));
        }
        max_psrf = std::max(max_psrf, diag::psrf_scalar(comp_chains));
        total_ess += comp_ess;
      }
      scenario.psrf_b[j] = max_psrf;
      scenario.ess_b[j] = total_ess / static_cast<double>(n);
    }
    result.scenarios.push_back(std::move(scenario));
  }
  return result;
}

void write_sensitivity_outputs(const SensitivityResult& result,
                               const std::string& outdir,
                               const io::Provenance& prov) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  {
    std::ofstream out(outdir + "/sensitivity_mse.csv");
    if (!out) throw io::DataError("cannot write sensitivity_mse.csv");
    out << io::provenance_header(prov);
    out << "scenario,mu1_mse,mu2_mse\n";
    for (const auto& s : result.scenarios)
      out << s.name << ',' << io::format_double(s.mse_mu[0], 8) << ','
          << io::format_double(s.mse_mu[1], 8) << '\n';
  }
  {
    std::ofstream out(outdir + "/sensitivity_psrf.csv");
    if (!out) throw io::DataError("cannot write sensitivity_psrf.csv");
    out << io::provenance_header(prov);
    out << "scenario,block,y1,y2\n";
    for (const auto& s : result.scenarios) {
      out << s.name << ",beta," << io::format_double(s.psrf_beta[0], 8) << ','
          << io::format_double(s.psrf_beta[1], 8) << '\n';
      out << s.name << ",gamma," << io::format_double(s.psrf_gamma[0], 8) << ','
          << io::format_double(s.psrf_gamma[1], 8) << '\n';
      out << s.name << ",b," << io::format_double(s.psrf_b[0], 8) << ','
          << io::format_double(s.psrf_b[1], 8) << '\n';
    }
  }
  {
    std::ofstream out(outdir + "/sensitivity_ess.csv");
    if (!out) throw io::DataError("cannot write sensitivity_ess.csv");
    out << io::provenance_header(prov);
    out << "scenario,block,y1,y2\n";
    for (const auto& s : result.scenarios) {
      out << s.name << ",beta," << io::format_double(s.ess_beta[0], 8) << ','
          << io::format_double(s.ess_beta[1], 8) << '\n';
      out << s.name << ",gamma," << io::format_double(s.ess_gamma[0], 8) << ','
          << io::format_double(s.ess_gamma[1], 8) << '\n';
      out << s.name << ",b," << io::format_double(s.ess_b[0], 8) << ','
          << io::format_double(s.ess_b[1], 8) << '\n';
    }
  }
}

}  // namespace bicmp::run
