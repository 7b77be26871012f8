#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bicmp/chain.hpp"
#include "bicmp/data.hpp"
#include "bicmp/design.hpp"

namespace bicmp::diag {

struct DicReport {
  enum class Estimator { exact, unbiased_rejection };
  double mean_deviance = 0.0;       // D-bar
  double deviance_at_mean = 0.0;    // D(theta-bar)
  double effective_parameters = 0.0;  // p_D
  double dic = 0.0;
  long n_posterior_samples_used = 0;
  Estimator estimator = Estimator::exact;
};

// Conditional DIC per outcome with the random effects treated as parameters.
// Only tractable likelihoods are allowed; pinned-shape CMP draws are evaluated
// as Poisson. Averages over the retained draws that carry random effects.
std::array<DicReport, 2> dic_exact(const mcmc::PosteriorDraws& draws,
                                   const std::vector<GameRecord>& games,
                                   const DesignBundle& design,
                                   mcmc::ModelKind likelihood_kind);

// CMP DIC through the unbiased 1/Z estimator: per observation and posterior
// sample, run the rejection sampler until r acceptances and use
// (M - 1) / ((r - 1) B Z_g) in place of 1/Z. Uses n_samples subsampled draws.
std::array<DicReport, 2> dic_cmp(const mcmc::PosteriorDraws& draws,
                                 const std::vector<GameRecord>& games,
                                 const DesignBundle& design,
                                 std::int64_t r = 1000, long n_samples = 100,
                                 std::uint64_t seed = 0);

// Brooks-Gelman multivariate potential scale reduction factor,
// (n-1)/n + ((m+1)/m) lambda_max(W^-1 B/n). Chains are draws x dim.
double psrf(const std::vector<Eigen::MatrixXd>& chains);
double psrf_scalar(const std::vector<Eigen::VectorXd>& chains);

// Effective sample size n / (1 + 2 sum rho_t) with Geyer's initial monotone
// positive sequence truncation. A constant chain yields 0.
double ess(const Eigen::VectorXd& chain);

struct PredictiveSummary {
  Eigen::VectorXd expected_home;  // mean predictive frequency per count value
  Eigen::VectorXd expected_away;
  long n_replicates = 0;
};

// Simulates every game once per used draw with fresh b* ~ N2(0, D) and
// tabulates score frequencies. Uses at most max_replicates evenly spaced
// draws (those carrying all needed blocks).
PredictiveSummary posterior_predictive(const mcmc::PosteriorDraws& draws,
                                       const DesignBundle& design,
                                       std::uint64_t seed,
                                       long max_replicates = 500);

struct RootogramRow {
  long count = 0;
  double sqrt_expected = 0.0;  // the curve
  double bar_bottom = 0.0;     // sqrt(expected) - sqrt(observed)
};

std::vector<RootogramRow> rootogram_data(const Eigen::VectorXd& observed,
                                         const Eigen::VectorXd& expected);

Eigen::VectorXd count_frequencies(const std::vector<GameRecord>& games,
                                  int outcome, long min_length = 0);

struct DispersionCell {
  std::string home_team;
  std::string away_team;
  long n_observations = 0;
  std::optional<double> index;  // absent when fewer than 2 observations
};

struct DispersionSummary {
  std::vector<DispersionCell> cells;
  double sigma_p = 0.0;
};

// Variance-to-mean ratio of the chosen outcome per (home team, away team)
// pairing, plus the Pearson dispersion statistic of a fixed-effect Poisson
// fit on the same outcome.
DispersionSummary index_of_dispersion(const std::vector<GameRecord>& games,
                                      int outcome);

// sigma_p: Pearson chi-square of a Poisson GLM (the model's fixed-effect
// design) divided by the residual degrees of freedom.
double dispersion_stat(const std::vector<GameRecord>& games,
                       const DesignBundle& design, int outcome);
double dispersion_stat_pooled(const std::vector<GameRecord>& games,
                              const DesignBundle& design);

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct AnovaResult {
  double f_stat = 0.0;
  double p_value = 1.0;
  long df_between = 0;
  long df_within = 0;
  bool valid = false;  // false when group variance is degenerate
};

AnovaResult anova_oneway(const std::vector<double>& values,
                         const std::vector<int>& groups);

}  // namespace bicmp::diag
