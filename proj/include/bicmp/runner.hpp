#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bicmp/chain.hpp"
#include "bicmp/diagnostics.hpp"
#include "bicmp/io.hpp"
#include "bicmp/model.hpp"
#include "bicmp/simgen.hpp"

namespace bicmp::run {

struct FitOptions {
  mcmc::ModelKind kind = mcmc::ModelKind::cmp;
  PriorSpec priors;
  mcmc::ChainConfig chain;
  std::int64_t dic_r = 1000;
  long dic_samples = 100;
  long predictive_replicates = 500;
  bool compute_dic = true;
  bool compute_predictive = true;
};

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  double ess = 0.0;   // summed across chains
  double psrf = 0.0;  // NaN when only one chain
};

struct FitResult {
  std::vector<mcmc::PosteriorDraws> chains;
  HaDraws ha;  // pooled across chains
  double p_ha_during_lt_before = 0.0;
  double p_ha_during_lt_after = 0.0;
  bool has_dic = false;
  std::array<diag::DicReport, 2> dic;
  std::vector<ParameterSummary> summaries;          // chain columns + HA rows
  std::map<std::string, double> block_psrf;         // multivariate, >= 2 chains
  std::map<std::string, double> acceptance_rates;   // averaged over chains
  diag::PredictiveSummary predictive;
  std::vector<diag::RootogramRow> rootogram_home;
  std::vector<diag::RootogramRow> rootogram_away;
};

// Concatenates retained draws of several chains into one container (random
// effect row indices are offset chain by chain).
mcmc::PosteriorDraws pool_draws(const std::vector<mcmc::PosteriorDraws>& chains);

Eigen::VectorXd quantiles(Eigen::VectorXd values,
                          const std::vector<double>& probs);

FitResult run_fit(const std::vector<GameRecord>& games,
                  const DesignBundle& design, const FitOptions& options);

void write_fit_outputs(const FitResult& result, const DesignBundle& design,
                       const FitOptions& options, const std::string& outdir,
                       const io::Provenance& provenance);

struct CompareOptions {
  sim::ScenarioSpec scenario;
  int replicates = 5;
  PriorSpec priors;
  mcmc::ChainConfig chain;
  std::int64_t dic_r = 1000;
  long dic_samples = 100;
};

struct CompareResult {
  struct Row {
    std::string model;
    double y1_mean = 0.0, y1_sd = 0.0;
    double y2_mean = 0.0, y2_sd = 0.0;
  };
  std::vector<Row> rows;            // cmp, poisson, nb
  Eigen::MatrixXd per_replicate;    // replicates x 6
  int replicates = 0;
};

CompareResult run_compare(const CompareOptions& options);
void write_compare_outputs(const CompareResult& result,
                           const CompareOptions& options,
                           const std::string& outdir,
                           const io::Provenance& provenance);

struct SensitivityOptions {
  std::uint64_t seed = 1;
  int n_seasons = 1;
  mcmc::ChainConfig chain;  // n_chains defaults to 3 in the CLI
  double beta_h = 0.6;
  double beta_a = 0.1;
};

// The four hyperparameter settings of the prior-sensitivity study.
std::vector<std::pair<std::string, PriorSpec>> sensitivity_scenarios();

struct SensitivityResult {
  struct Scenario {
    std::string name;
    std::array<double, 2> mse_mu{};
    std::array<double, 2> psrf_beta{};
    std::array<double, 2> psrf_gamma{};
    std::array<double, 2> psrf_b{};
    std::array<double, 2> ess_beta{};
    std::array<double, 2> ess_gamma{};
    std::array<double, 2> ess_b{};
  };
  std::vector<Scenario> scenarios;
};

SensitivityResult run_sensitivity(const SensitivityOptions& options);
void write_sensitivity_outputs(const SensitivityResult& result,
                               const std::string& outdir,
                               const io::Provenance& provenance);

}  // namespace bicmp::run
