#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "bicmp/rng.hpp"

namespace bicmp::dist {

// Zero-mean bivariate normal with precomputed inverse and normalizer, for
// repeated density evaluation at a fixed covariance.
class Mvn2 {
 public:
  explicit Mvn2(const Eigen::Matrix2d& cov);
  double log_pdf(const Eigen::Vector2d& x) const;
  Eigen::Vector2d sample(Rng& rng) const;  // via the Cholesky factor
  const Eigen::Matrix2d& cov() const { return cov_; }

 private:
  Eigen::Matrix2d cov_;
  Eigen::Matrix2d prec_;
  Eigen::Matrix2d chol_;  // lower
  double log_norm_;
};

// log N_p(x | mean * 1, (precision * I)^-1), the isotropic prior used for the
// coefficient blocks.
double log_isotropic_normal(const Eigen::VectorXd& x, double mean,
                            double precision);

// Wishart(df, scale) on 2x2 matrices.
double wishart_log_density_2d(const Eigen::Matrix2d& x, double df,
                              const Eigen::Matrix2d& scale);
Eigen::Matrix2d sample_wishart_2d(double df, const Eigen::Matrix2d& scale,
                                  Rng& rng);

double log_poisson_pmf(std::int64_t y, double mu);

// IRLS maximum-likelihood fit of a log-link Poisson regression (tiny ridge
// keeps rank-deficient designs solvable). Used by the dispersion statistic
// and to shape initial MCMC proposals.
Eigen::VectorXd poisson_glm_fit(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y);

// Negative Binomial parameterized by mean mu and size kappa:
// Var = mu + mu^2 / kappa. Stable for very large kappa (Poisson limit).
double log_negbin_pmf(std::int64_t y, double mu, double kappa);
std::int64_t sample_negbin(double mu, double kappa, Rng& rng);

}  // namespace bicmp::dist
