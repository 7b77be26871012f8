#include "bicmp/distributions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bicmp/cmp.hpp"

namespace bicmp::dist {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

Mvn2::Mvn2(const Eigen::Matrix2d& cov) : cov_(cov) {
  const double det = cov_(0, 0) * cov_(1, 1) - cov_(0, 1) * cov_(1, 0);
  if (!(cov_(0, 0) > 0.0) || !(det > 0.0) ||
      std::abs(cov_(0, 1) - cov_(1, 0)) > 1e-12 * (1.0 + std::abs(cov_(0, 1))))
    throw std::domain_error("Mvn2: covariance must be symmetric positive definite");
  prec_ << cov_(1, 1) / det, -cov_(0, 1) / det, -cov_(1, 0) / det, cov_(0, 0) / det;
  log_norm_ = -kLog2Pi - 0.5 * std::log(det);
  Eigen::LLT<Eigen::Matrix2d> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("Mvn2: Cholesky factorization failed");
  chol_ = llt.matrixL();
}

double Mvn2::log_pdf(const Eigen::Vector2d& x) const {
  return log_norm_ - 0.5 * x.dot(prec_ * x);
}

Eigen::Vector2d Mvn2::sample(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector2d z(normal(rng), normal(rng));
  return chol_ * z;
}

double log_isotropic_normal(const Eigen::VectorXd& x, double mean,
                            double precision) {
  if (!(precision > 0.0))
    throw std::domain_error("log_isotropic_normal: precision must be positive");
  const double p = static_cast<double>(x.size());
  const double ss = (x.array() - mean).matrix().squaredNorm();
  return 0.5 * p * (std::log(precision) - kLog2Pi) - 0.5 * precision * ss;
}

double wishart_log_density_2d(const Eigen::Matrix2d& x, double df,
                              const Eigen::Matrix2d& scale) {
  if (!(df > 1.0))
    throw std::domain_error("wishart_log_density_2d: df must exceed dim - 1");
  const double det_x = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
  const double det_s = scale(0, 0) * scale(1, 1) - scale(0, 1) * scale(1, 0);
  if (!(det_x > 0.0) || !(det_s > 0.0))
    throw std::domain_error("wishart_log_density_2d: matrices must be SPD");
  Eigen::Matrix2d scale_inv;
  scale_inv << scale(1, 1) / det_s, -scale(0, 1) / det_s, -scale(1, 0) / det_s,
      scale(0, 0) / det_s;
  const double trace = (scale_inv * x).trace();
  const double log_gamma2 =
      0.5 * std::log(std::numbers::pi) + std::lgamma(0.5 * df) +
      std::lgamma(0.5 * (df - 1.0));
  return 0.5 * (df - 3.0) * std::log(det_x) - 0.5 * trace -
         df * std::log(2.0) - log_gamma2 - 0.5 * df * std::log(det_s);
}

Eigen::Matrix2d sample_wishart_2d(double df, const Eigen::Matrix2d& scale,
                                  Rng& rng) {
  if (!(df > 1.0))
    throw std::domain_error("sample_wishart_2d: df must exceed dim - 1");
  Eigen::LLT<Eigen::Matrix2d> llt(scale);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("sample_wishart_2d: scale not positive definite");
  const Eigen::Matrix2d l = llt.matrixL();
  // Bartlett decomposition
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> chi1(0.5 * df, 2.0);
  std::gamma_distribution<double> chi2(0.5 * (df - 1.0), 2.0);
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  a(0, 0) = std::sqrt(chi1(rng));
  a(1, 0) = normal(rng);
  a(1, 1) = std::sqrt(chi2(rng));
  const Eigen::Matrix2d la = l * a;
  return la * la.transpose();
}

Eigen::VectorXd poisson_glm_fit(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y) {
  const long n = x.rows();
  const long p = x.cols();
  if (y.size() != n) throw std::invalid_argument("poisson_glm_fit: size mismatch");
  Eigen::VectorXd mu = y.array() + 0.5;
  Eigen::VectorXd eta = mu.array().log();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  const double ridge = 1e-8;
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd w = mu;
    const Eigen::VectorXd z = eta.array() + (y - mu).array() / mu.array();
    const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    Eigen::MatrixXd a = xtw * x;
    a.diagonal().array() += ridge;
    const Eigen::VectorXd beta_new = a.ldlt().solve(xtw * z);
    const double delta = (beta_new - beta).cwiseAbs().maxCoeff();
    beta = beta_new;
    eta = (x * beta).cwiseMax(-30.0).cwiseMin(30.0);
    mu = eta.array().exp();
    if (delta < 1e-10) break;
  }
  return beta;
}

double log_poisson_pmf(std::int64_t y, double mu) {
  if (y < 0) return -std::numeric_limits<double>::infinity();
  if (!(mu > 0.0)) throw std::domain_error("log_poisson_pmf: mu must be positive");
  return static_cast<double>(y) * std::log(mu) - mu - cmp::log_factorial(y);
}

double log_negbin_pmf(std::int64_t y, double mu, double kappa) {
  if (y < 0) return -std::numeric_limits<double>::infinity();
  if (!(mu > 0.0) || !(kappa > 0.0))
    throw std::domain_error("log_negbin_pmf: mu and kappa must be positive");
  // lgamma(y + kappa) - lgamma(kappa) loses precision for huge kappa; the
  // explicit product is exact there and y is small in this domain.
  double log_rising;
  if (kappa > 1e6 && y < 4096) {
    log_rising = 0.0;
    for (std::int64_t k = 0; k < y; ++k)
      log_rising += std::log(kappa + static_cast<double>(k));
  } else {
    log_rising = std::lgamma(static_cast<double>(y) + kappa) - std::lgamma(kappa);
  }
  const double log_denom = std::log1p(mu / kappa);  // log((kappa+mu)/kappa)
  return log_rising - cmp::log_factorial(y) - kappa * log_denom +
         static_cast<double>(y) * (std::log(mu) - std::log(kappa + mu));
}

std::int64_t sample_negbin(double mu, double kappa, Rng& rng) {
  std::gamma_distribution<double> gamma(kappa, mu / kappa);
  const double lambda = gamma(rng);
  if (lambda <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> pois(lambda);
  return pois(rng);
}

}  // namespace bicmp::dist
