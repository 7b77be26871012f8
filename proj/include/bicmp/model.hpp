#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bicmp/data.hpp"
#include "bicmp/design.hpp"

namespace bicmp {

// Prior hyperparameters. Means and precisions are scalars broadcast over the
// coefficient blocks (beta_0 * 1, B_0 = beta_precision * I), which covers
// every configuration used in practice.
struct PriorSpec {
  double beta_mean = 0.0;
  double beta_precision = 0.1;
  double gamma_mean = 0.0;
  double gamma_precision = 0.1;
  double wishart_df = 50.0;                               // v_0
  Eigen::Matrix2d wishart_scale = Eigen::Matrix2d::Identity();  // R_0

  void validate() const;
};

// Full parameter state. Outcome 0 = home, 1 = away; random_effects is n x 2
// and enters only the centering predictors.
struct ModelParameters {
  Eigen::VectorXd beta_home;
  Eigen::VectorXd beta_away;
  Eigen::VectorXd gamma_home;
  Eigen::VectorXd gamma_away;
  Eigen::MatrixXd random_effects;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();

  const Eigen::VectorXd& beta(int j) const { return j == 0 ? beta_home : beta_away; }
  const Eigen::VectorXd& gamma(int j) const { return j == 0 ? gamma_home : gamma_away; }
};

ModelParameters zero_parameters(const DesignBundle& design);

struct LinearPredictors {
  double mu_home;
  double mu_away;
  double nu_home;
  double nu_away;
};

// mu_ij = exp(x_ij' beta_j + b_ij), nu_ij = exp(x_ij' gamma_j).
LinearPredictors linear_predictors(const ModelParameters& params,
                                   const DesignBundle& design, long game);

// Z-free part of the log joint: priors on (beta, gamma, D^-1, b) plus the sum
// of CMP log kernels. The intractable -log Z terms are deliberately absent;
// the quantity is only meaningful inside ratios where they cancel.
double log_joint_kernel(const ModelParameters& params,
                        const std::vector<GameRecord>& games,
                        const DesignBundle& design, const PriorSpec& priors);

// Home-advantage functionals per retained draw:
//   during  = beta_H - beta_A
//   before  = (beta_H + c_H) - (beta_A + c_A)
//   after   = (beta_H + c'_H) - (beta_A + c'_A)
struct HaDraws {
  Eigen::VectorXd before;
  Eigen::VectorXd during;
  Eigen::VectorXd after;
};

HaDraws ha_functionals(const Eigen::MatrixXd& beta_home_draws,
                       const Eigen::MatrixXd& beta_away_draws,
                       const DesignBundle& design);

// Model-implied covariance between the two scores of one game,
// lambda_1 e^{d11/2} (e^{d12} - 1) lambda_2 e^{d22/2}, random effect excluded.
double model_covariance(const ModelParameters& params,
                        const DesignBundle& design, long game);

}  // namespace bicmp
