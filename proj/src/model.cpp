#include "bicmp/model.hpp"

#include <cmath>
#include <stdexcept>

#include "bicmp/cmp.hpp"
#include "bicmp/distributions.hpp"

namespace bicmp {

void PriorSpec::validate() const {
  if (!(beta_precision > 0.0) || !(gamma_precision > 0.0))
    throw std::domain_error("PriorSpec: precisions must be positive");
  if (!(wishart_df > 1.0))
    throw std::domain_error("PriorSpec: wishart_df must exceed 1");
  const double det = wishart_scale(0, 0) * wishart_scale(1, 1) -
                     wishart_scale(0, 1) * wishart_scale(1, 0);
  if (!(wishart_scale(0, 0) > 0.0) || !(det > 0.0))
    throw std::domain_error("PriorSpec: wishart_scale must be positive definite");
}

ModelParameters zero_parameters(const DesignBundle& design) {
  ModelParameters p;
  const int cols = design.n_cols();
  p.beta_home = Eigen::VectorXd::Zero(cols);
  p.beta_away = Eigen::VectorXd::Zero(cols);
  p.gamma_home = Eigen::VectorXd::Zero(cols);
  p.gamma_away = Eigen::VectorXd::Zero(cols);
  p.random_effects = Eigen::MatrixXd::Zero(design.n_games(), 2);
  p.cov = Eigen::Matrix2d::Identity();
  return p;
}

LinearPredictors linear_predictors(const ModelParameters& params,
                                   const DesignBundle& design, long game) {
  if (game < 0 || game >= design.n_games())
    throw std::out_of_range("linear_predictors: game index out of range");
  if (params.beta_home.size() != design.n_cols() ||
      params.gamma_home.size() != design.n_cols())
    throw std::invalid_argument("linear_predictors: dimension mismatch");
  const auto xh = design.home.row(game);
  const auto xa = design.away.row(game);
  LinearPredictors lp;
  lp.mu_home = std::exp(xh.dot(params.beta_home) + params.random_effects(game, 0));
  lp.mu_away = std::exp(xa.dot(params.beta_away) + params.random_effects(game, 1));
  lp.nu_home = std::exp(xh.dot(params.gamma_home));
  lp.nu_away = std::exp(xa.dot(params.gamma_away));
  return lp;
}

double log_joint_kernel(const ModelParameters& params,
                        const std::vector<GameRecord>& games,
                        const DesignBundle& design, const PriorSpec& priors) {
  priors.validate();
  const Eigen::Matrix2d d = params.cov;
  const Eigen::Matrix2d d_inv = [&] {
    const double det = d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0);
    if (!(det > 0.0) || !(d(0, 0) > 0.0))
      throw std::domain_error("log_joint_kernel: cov not positive definite");
    Eigen::Matrix2d inv;
    inv << d(1, 1) / det, -d(0, 1) / det, -d(1, 0) / det, d(0, 0) / det;
    return inv;
  }();

  double total = 0.0;
  total += dist::log_isotropic_normal(params.beta_home, priors.beta_mean,
                                      priors.beta_precision);
  total += dist::log_isotropic_normal(params.beta_away, priors.beta_mean,
                                      priors.beta_precision);
  total += dist::log_isotropic_normal(params.gamma_home, priors.gamma_mean,
                                      priors.gamma_precision);
  total += dist::log_isotropic_normal(params.gamma_away, priors.gamma_mean,
                                      priors.gamma_precision);
  total += dist::wishart_log_density_2d(d_inv, priors.wishart_df,
                                        priors.wishart_scale);

  const dist::Mvn2 re_prior(d);
  for (long i = 0; i < static_cast<long>(games.size()); ++i) {
    total += re_prior.log_pdf(params.random_effects.row(i).transpose());
    const LinearPredictors lp = linear_predictors(params, design, i);
    total += cmp::log_kernel(games[i].home_score, {lp.mu_home, lp.nu_home});
    total += cmp::log_kernel(games[i].away_score, {lp.mu_away, lp.nu_away});
  }
  return total;
}

HaDraws ha_functionals(const Eigen::MatrixXd& beta_home_draws,
                       const Eigen::MatrixXd& beta_away_draws,
                       const DesignBundle& design) {
  const int needed = design.phase_after_col + 1;
  if (beta_home_draws.cols() < needed || beta_away_draws.cols() < needed)
    throw std::invalid_argument(
        "ha_functionals: draws are missing intercept or phase coefficients");
  if (beta_home_draws.rows() != beta_away_draws.rows())
    throw std::invalid_argument("ha_functionals: draw counts differ");
  const int ic = design.intercept_col;
  const int bc = design.phase_before_col;
  const int ac = design.phase_after_col;
  HaDraws ha;
  ha.during = beta_home_draws.col(ic) - beta_away_draws.col(ic);
  ha.before = (beta_home_draws.col(ic) + beta_home_draws.col(bc)) -
              (beta_away_draws.col(ic) + beta_away_draws.col(bc));
  ha.after = (beta_home_draws.col(ic) + beta_home_draws.col(ac)) -
             (beta_away_draws.col(ic) + beta_away_draws.col(ac));
  return ha;
}

double model_covariance(const ModelParameters& params,
                        const DesignBundle& design, long game) {
  const double lambda_home = std::exp(design.home.row(game).dot(params.beta_home));
  const double lambda_away = std::exp(design.away.row(game).dot(params.beta_away));
  const double d11 = params.cov(0, 0);
  const double d12 = params.cov(0, 1);
  const double d22 = params.cov(1, 1);
  return lambda_home * std::exp(0.5 * d11) * (std::exp(d12) - 1.0) *
         lambda_away * std::exp(0.5 * d22);
}

}  // namespace bicmp
