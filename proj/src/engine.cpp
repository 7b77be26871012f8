#include "bicmp/chain.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

#include "bicmp/cmp.hpp"

namespace bicmp::mcmc {

namespace {

// Linear predictors past this magnitude are outside any representable score
// regime; proposals reaching them are rejected instead of fed to exp().
constexpr double kPredictorBound = 30.0;
constexpr double kShapePredictorBound = 5.0;

double log_uniform(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::log(unif(rng));
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::cmp:
      return "cmp";
    case ModelKind::poisson:
      return "poisson";
    case ModelKind::negative_binomial:
      return "nb";
  }
  return "cmp";
}

void ChainConfig::validate() const {
  if (n_iterations < 1 || burn_in < 0 || burn_in >= n_iterations)
    throw std::invalid_argument("ChainConfig: need 0 <= burn_in < n_iterations");
  if (thin < 1) throw std::invalid_argument("ChainConfig: thin must be >= 1");
  if (!(target_acceptance > 0.0) || !(target_acceptance < 1.0))
    throw std::invalid_argument("ChainConfig: target_acceptance must be in (0,1)");
  if (n_chains < 1) throw std::invalid_argument("ChainConfig: n_chains must be >= 1");
  if (random_effect_thin_factor < 1)
    throw std::invalid_argument("ChainConfig: random_effect_thin_factor must be >= 1");
  if (coefficient_block_size < 0)
    throw std::invalid_argument("ChainConfig: coefficient_block_size must be >= 0");
  if (!(adaptation_decay_exponent > 0.5) || adaptation_decay_exponent > 1.0)
    throw std::invalid_argument(
        "ChainConfig: adaptation_decay_exponent must lie in (0.5, 1]");
  if (!(initial_proposal_scale > 0.0))
    throw std::invalid_argument("ChainConfig: initial_proposal_scale must be positive");
}

std::vector<std::string> chain_column_names(ModelKind kind,
                                            const DesignBundle& design,
                                            bool shape_pinned) {
  std::vector<std::string> names;
  const int p = design.n_cols();
  for (const char* block : {"beta_home", "beta_away"})
    for (int c = 0; c < p; ++c)
      names.push_back(std::string(block) + "[" + std::to_string(c) + "]");
  if (kind == ModelKind::cmp && !shape_pinned) {
    for (const char* block : {"gamma_home", "gamma_away"})
      for (int c = 0; c < p; ++c)
        names.push_back(std::string(block) + "[" + std::to_string(c) + "]");
  }
  names.push_back("d11");
  names.push_back("d12");
  names.push_back("d22");
  if (kind == ModelKind::negative_binomial) {
    names.push_back("kappa_home");
    names.push_back("kappa_away");
  }
  return names;
}

double exchange_log_ratio_random_effect(
    const std::array<std::int64_t, 2>& y_obs,
    const std::array<std::int64_t, 2>& y_aux,
    const std::array<double, 2>& log_mu_cur,
    const std::array<double, 2>& log_mu_prop, const std::array<double, 2>& nu,
    const Eigen::Vector2d& b_cur, const Eigen::Vector2d& b_prop,
    const dist::Mvn2& re_prior) {
  double logr = re_prior.log_pdf(b_prop) - re_prior.log_pdf(b_cur);
  for (int j = 0; j < 2; ++j) {
    logr += cmp_log_kernel_term(y_obs[j], log_mu_prop[j], nu[j]) -
            cmp_log_kernel_term(y_obs[j], log_mu_cur[j], nu[j]);
    logr += cmp_log_kernel_term(y_aux[j], log_mu_cur[j], nu[j]) -
            cmp_log_kernel_term(y_aux[j], log_mu_prop[j], nu[j]);
  }
  return logr;
}

double exchange_log_ratio_block(const std::vector<std::int64_t>& y_obs,
                                const std::vector<std::int64_t>& y_aux,
                                const Eigen::VectorXd& log_mu_cur,
                                const Eigen::VectorXd& log_mu_prop,
                                const Eigen::VectorXd& nu_cur,
                                const Eigen::VectorXd& nu_prop,
                                double prior_log_cur, double prior_log_prop) {
  const long n = static_cast<long>(y_obs.size());
  if (n != static_cast<long>(y_aux.size()) || n != log_mu_cur.size() ||
      n != log_mu_prop.size() || n != nu_cur.size() || n != nu_prop.size())
    throw std::invalid_argument("exchange_log_ratio_block: length mismatch");
  double logr = prior_log_prop - prior_log_cur;
  for (long i = 0; i < n; ++i) {
    logr += cmp_log_kernel_term(y_obs[i], log_mu_prop[i], nu_prop[i]) -
            cmp_log_kernel_term(y_obs[i], log_mu_cur[i], nu_cur[i]);
    logr += cmp_log_kernel_term(y_aux[i], log_mu_cur[i], nu_cur[i]) -
            cmp_log_kernel_term(y_aux[i], log_mu_prop[i], nu_prop[i]);
  }
  return logr;
}

Eigen::Matrix2d draw_covariance(const Eigen::MatrixXd& random_effects,
                                const PriorSpec& priors, Rng& rng) {
  const long n = random_effects.rows();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  for (long i = 0; i < n; ++i) {
    const Eigen::Vector2d b = random_effects.row(i).transpose();
    outer += b * b.transpose();
  }
  const Eigen::Matrix2d r0 = priors.wishart_scale;
  const double det_r0 = r0(0, 0) * r0(1, 1) - r0(0, 1) * r0(1, 0);
  Eigen::Matrix2d r0_inv;
  r0_inv << r0(1, 1) / det_r0, -r0(0, 1) / det_r0, -r0(1, 0) / det_r0,
      r0(0, 0) / det_r0;
  const Eigen::Matrix2d a = r0_inv + outer;
  const double det_a = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (!(det_a > 0.0))
    throw std::runtime_error("draw_covariance: degenerate random-effect scatter");
  Eigen::Matrix2d scale;
  scale << a(1, 1) / det_a, -a(0, 1) / det_a, -a(1, 0) / det_a, a(0, 0) / det_a;
  const Eigen::Matrix2d d_inv = dist::sample_wishart_2d(
      static_cast<double>(n) + priors.wishart_df, scale, rng);
  const double det_dinv = d_inv(0, 0) * d_inv(1, 1) - d_inv(0, 1) * d_inv(1, 0);
  if (!(det_dinv > 0.0))
    throw std::runtime_error("draw_covariance: non-invertible Wishart draw");
  Eigen::Matrix2d d;
  d << d_inv(1, 1) / det_dinv, -d_inv(0, 1) / det_dinv,
      -d_inv(1, 0) / det_dinv, d_inv(0, 0) / det_dinv;
  d = 0.5 * (d + d.transpose()).eval();
  return d;
}

struct McmcEngine::State {
  std::array<Eigen::VectorXd, 2> beta;
  std::array<Eigen::VectorXd, 2> gamma;
  Eigen::MatrixXd b;  // n x 2
  Eigen::Matrix2d cov;
  dist::Mvn2 re_prior{Eigen::Matrix2d::Identity()};
  std::array<Eigen::VectorXd, 2> fe;       // X_j beta_j
  std::array<Eigen::VectorXd, 2> log_nu;   // X_j gamma_j (CMP)
  std::array<Eigen::VectorXd, 2> nu;       // exp(log_nu)
  std::array<double, 2> log_kappa{};       // NB
  RamState ram_b;
  std::array<std::vector<RamState>, 2> ram_coef;  // one per sub-block
  std::array<RamState, 2> ram_kappa;
};

// Columns whose design entries are identically zero (e.g. phase offsets when
// the data holds a single phase) never touch the likelihood: their full
// conditional is the coefficient prior. They are Gibbs-drawn directly and the
// RAM block covers only the active columns, whose scales the factor can learn.

// Fisher information of the coefficient family on the active columns of
// outcome j, evaluated at a Poisson GLM fit (plus the prior precision).
// Proposals start from this curvature: rank-one RAM adaptation fixes scales
// quickly but cannot learn the shape of a wide block within a burn-in.
// The shape family's weights are the per-game variances of the kernel score
// y log(mu) - log(y!) at nu = 1.
Eigen::MatrixXd McmcEngine::laplace_information(int outcome,
                                                bool shape_family) const {
  const int j = outcome;
  const auto& active = active_cols_[j];
  const int n_active = static_cast<int>(active.size());
  Eigen::MatrixXd x(n_, n_active);
  for (int c = 0; c < n_active; ++c) x.col(c) = design_.outcome(j).col(active[c]);
  const Eigen::VectorXd beta_hat = dist::poisson_glm_fit(x, y_real_[j]);
  const Eigen::VectorXd eta = (x * beta_hat).cwiseMax(-20.0).cwiseMin(20.0);
  Eigen::VectorXd w(n_);
  if (!shape_family) {
    w = eta.array().exp();
  } else {
    for (long i = 0; i < n_; ++i) {
      const double mu = std::exp(eta(i));
      const auto cap = static_cast<std::int64_t>(mu + 12.0 * std::sqrt(mu) + 25.0);
      double m1 = 0.0, m2 = 0.0;
      for (std::int64_t yv = 0; yv <= cap; ++yv) {
        const double p = std::exp(dist::log_poisson_pmf(yv, mu));
        const double k = static_cast<double>(yv) * eta(i) - cmp::log_factorial(yv);
        m1 += p * k;
        m2 += p * k * k;
      }
      w(i) = std::max(m2 - m1 * m1, 1e-4);
    }
  }
  Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
  info.diagonal().array() += (shape_family ? priors_.gamma_precision
                                           : priors_.beta_precision) + 1e-8;
  return info;
}

McmcEngine::McmcEngine(ModelKind kind, const std::vector<GameRecord>& games,
                       const DesignBundle& design, const PriorSpec& priors,
                       const ChainConfig& config)
    : kind_(kind), design_(design), priors_(priors), cfg_(config) {
  cfg_.validate();
  priors_.validate();
  if (games.empty()) throw std::invalid_argument("McmcEngine: no games");
  if (static_cast<long>(games.size()) != design_.n_games())
    throw std::invalid_argument("McmcEngine: design does not match data");
  n_ = design_.n_games();
  p_ = design_.n_cols();
  for (int j = 0; j < 2; ++j) {
    y_[j].resize(n_);
    y_real_[j].resize(n_);
  }
  for (long i = 0; i < n_; ++i) {
    y_[0][i] = games[i].home_score;
    y_[1][i] = games[i].away_score;
    y_real_[0](i) = static_cast<double>(games[i].home_score);
    y_real_[1](i) = static_cast<double>(games[i].away_score);
  }
  for (int j = 0; j < 2; ++j) {
    mean_score_[j] = y_real_[j].mean();
    for (int c = 0; c < p_; ++c) {
      if ((design_.outcome(j).col(c).array() != 0.0).any())
        active_cols_[j].push_back(c);
      else
        dead_cols_[j].push_back(c);
    }
    const int n_active = static_cast<int>(active_cols_[j].size());
    const int chunk = cfg_.coefficient_block_size > 0
                          ? cfg_.coefficient_block_size
                          : n_active;
    for (int begin = 0; begin < n_active; begin += chunk)
      chunks_[j].emplace_back(begin, std::min(chunk, n_active - begin));
  }
}

void McmcEngine::init_state(State& s) const {
  for (int j = 0; j < 2; ++j) {
    s.beta[j] = Eigen::VectorXd::Zero(p_);
    s.beta[j](design_.intercept_col) = std::log(std::max(mean_score_[j], 0.05));
    s.gamma[j] = Eigen::VectorXd::Zero(p_);
    s.fe[j] = design_.outcome(j) * s.beta[j];
    s.log_nu[j] = Eigen::VectorXd::Zero(n_);
    s.nu[j] = Eigen::VectorXd::Ones(n_);
    // per sub-block proposals seeded from the conditional Laplace
    // covariance, (info submatrix)^-1, per family
    const bool joint = kind_ == ModelKind::cmp && !cfg_.pin_shape_to_poisson;
    const Eigen::MatrixXd info_mu = laplace_information(j, false);
    const Eigen::MatrixXd info_nu =
        joint ? laplace_information(j, true) : Eigen::MatrixXd();
    auto chol_of_inverse = [](const Eigen::MatrixXd& block_info) {
      const int m = static_cast<int>(block_info.rows());
      const Eigen::MatrixXd cov =
          block_info.llt().solve(Eigen::MatrixXd::Identity(m, m));
      Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (cov + cov.transpose()));
      return llt.info() == Eigen::Success
                 ? Eigen::MatrixXd(llt.matrixL())
                 : Eigen::MatrixXd(0.1 * Eigen::MatrixXd::Identity(m, m));
    };
    for (const auto& [begin, len] : chunks_[j]) {
      const int dim = joint ? 2 * len : len;
      RamState ram = make_ram(dim, cfg_.initial_proposal_scale);
      ram.factor = Eigen::MatrixXd::Zero(dim, dim);
      ram.factor.topLeftCorner(len, len) =
          chol_of_inverse(info_mu.block(begin, begin, len, len));
      if (joint)
        ram.factor.bottomRightCorner(len, len) =
            chol_of_inverse(info_nu.block(begin, begin, len, len));
      ram.factor *= 2.0 / std::sqrt(static_cast<double>(dim));
      s.ram_coef[j].push_back(std::move(ram));
    }
    s.ram_kappa[j] = make_ram(1, cfg_.initial_proposal_scale);
    if (kind_ == ModelKind::negative_binomial) {
      // moment start for the size parameter, clipped to a sane range
      const double m = mean_score_[j];
      const double v = (y_real_[j].array() - m).square().sum() /
                       std::max<double>(1.0, static_cast<double>(n_ - 1));
      double kappa = (v > m && m > 0.0) ? m * m / (v - m) : 100.0;
      kappa = std::min(std::max(kappa, 0.1), 1e4);
      s.log_kappa[j] = std::log(kappa);
    }
  }
  s.b = Eigen::MatrixXd::Zero(n_, 2);
  s.cov = Eigen::Matrix2d::Identity();
  s.re_prior = dist::Mvn2(s.cov);
  s.ram_b = make_ram(2, cfg_.initial_proposal_scale);
}

void McmcEngine::update_random_effects(State& s, Rng& rng, bool adapt) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool cmp_mode = kind_ == ModelKind::cmp;
  for (long i = 0; i < n_; ++i) {
    Eigen::Vector2d u(normal(rng), normal(rng));
    const Eigen::Vector2d b_cur = s.b.row(i).transpose();
    const Eigen::Vector2d b_prop = b_cur + s.ram_b.factor * u;

    double logr = s.re_prior.log_pdf(b_prop) - s.re_prior.log_pdf(b_cur);
    bool in_bounds = true;
    if (!cfg_.prior_only) {
      for (int j = 0; j < 2 && in_bounds; ++j)
        in_bounds = std::abs(s.fe[j](i) + b_prop(j)) <= kPredictorBound;
      if (!in_bounds) {
        logr = -std::numeric_limits<double>::infinity();
      } else {
        for (int j = 0; j < 2; ++j) {
          const double lm_cur = s.fe[j](i) + b_cur(j);
          const double lm_prop = s.fe[j](i) + b_prop(j);
          const double nu = s.nu[j](i);
          const std::int64_t y = y_[j][i];
          if (cmp_mode) {
            const cmp::CmpSampler aux_sampler(lm_prop, nu);
            const std::int64_t y_aux = aux_sampler.draw(rng);
            logr += cmp_log_kernel_term(y, lm_prop, nu) -
                    cmp_log_kernel_term(y, lm_cur, nu);
            logr += cmp_log_kernel_term(y_aux, lm_cur, nu) -
                    cmp_log_kernel_term(y_aux, lm_prop, nu);
          } else if (kind_ == ModelKind::poisson) {
            logr += dist::log_poisson_pmf(y, std::exp(lm_prop)) -
                    dist::log_poisson_pmf(y, std::exp(lm_cur));
          } else {
            const double kappa = std::exp(s.log_kappa[j]);
            logr += dist::log_negbin_pmf(y, std::exp(lm_prop), kappa) -
                    dist::log_negbin_pmf(y, std::exp(lm_cur), kappa);
          }
        }
      }
    }

    const double alpha = std::min(1.0, std::exp(logr));
    const bool accept = logr >= 0.0 || log_uniform(rng) < logr;
    if (accept) s.b.row(i) = b_prop.transpose();
    if (adapt) {
      ++s.ram_b.attempted_adapt;
      if (accept) ++s.ram_b.accepted_adapt;
      ram_adapt(s.ram_b, u, alpha, cfg_.target_acceptance,
                cfg_.adaptation_decay_exponent);
    } else {
      ++s.ram_b.attempted_fixed;
      if (accept) ++s.ram_b.accepted_fixed;
    }
  }
}

// Coefficients update in a sequence of sub-block Exchange (or exact-MH)
// steps. For the CMP model each sub-block pairs the centering coefficients
// with their shape counterparts: mu and nu trade off along a soft
// mean-compensation ridge (E[Y] ~ mu + 1/(2 nu) - 1/2), and only a joint
// proposal lets the 2m x 2m RAM factor learn that geometry.
void McmcEngine::update_coefficients(State& s, int outcome, Rng& rng,
                                     bool adapt) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int j = outcome;
  const bool joint = kind_ == ModelKind::cmp && !cfg_.pin_shape_to_poisson;
  const auto& active = active_cols_[j];

  for (size_t chunk = 0; chunk < chunks_[j].size(); ++chunk) {
    const auto [begin, len] = chunks_[j][chunk];
    RamState& ram = s.ram_coef[j][chunk];
    const int dim = joint ? 2 * len : len;

    Eigen::VectorXd u(dim);
    for (int c = 0; c < dim; ++c) u(c) = normal(rng);
    const Eigen::VectorXd step = ram.factor * u;

    Eigen::VectorXd beta_prop = s.beta[j];
    for (int c = 0; c < len; ++c) beta_prop(active[begin + c]) += step(c);
    const Eigen::VectorXd lin_mu_prop = design_.outcome(j) * beta_prop;
    Eigen::VectorXd gamma_prop, lin_nu_prop;
    if (joint) {
      gamma_prop = s.gamma[j];
      for (int c = 0; c < len; ++c)
        gamma_prop(active[begin + c]) += step(len + c);
      lin_nu_prop = design_.outcome(j) * gamma_prop;
    }

    double logr =
        dist::log_isotropic_normal(beta_prop, priors_.beta_mean,
                                   priors_.beta_precision) -
        dist::log_isotropic_normal(s.beta[j], priors_.beta_mean,
                                   priors_.beta_precision);
    if (joint)
      logr += dist::log_isotropic_normal(gamma_prop, priors_.gamma_mean,
                                         priors_.gamma_precision) -
              dist::log_isotropic_normal(s.gamma[j], priors_.gamma_mean,
                                         priors_.gamma_precision);

    if (!cfg_.prior_only) {
      bool in_bounds =
          ((lin_mu_prop + s.b.col(j)).array().abs().maxCoeff()) <=
          kPredictorBound;
      if (in_bounds && joint)
        in_bounds = lin_nu_prop.array().abs().maxCoeff() <= kShapePredictorBound;
      if (!in_bounds) {
        logr = -std::numeric_limits<double>::infinity();
      } else if (kind_ == ModelKind::cmp) {
        for (long i = 0; i < n_; ++i) {
          const std::int64_t y = y_[j][i];
          const double lm_cur = s.fe[j](i) + s.b(i, j);
          const double lm_prop = lin_mu_prop(i) + s.b(i, j);
          const double nu_cur = s.nu[j](i);
          const double nu_prop = joint ? std::exp(lin_nu_prop(i)) : nu_cur;
          const cmp::CmpSampler aux_sampler(lm_prop, nu_prop);
          const std::int64_t y_aux = aux_sampler.draw(rng);
          logr += cmp_log_kernel_term(y, lm_prop, nu_prop) -
                  cmp_log_kernel_term(y, lm_cur, nu_cur);
          logr += cmp_log_kernel_term(y_aux, lm_cur, nu_cur) -
                  cmp_log_kernel_term(y_aux, lm_prop, nu_prop);
        }
      } else {
        for (long i = 0; i < n_; ++i) {
          const std::int64_t y = y_[j][i];
          const double mu_cur = std::exp(s.fe[j](i) + s.b(i, j));
          const double mu_prop = std::exp(lin_mu_prop(i) + s.b(i, j));
          if (kind_ == ModelKind::poisson) {
            logr += dist::log_poisson_pmf(y, mu_prop) -
                    dist::log_poisson_pmf(y, mu_cur);
          } else {
            const double kappa = std::exp(s.log_kappa[j]);
            logr += dist::log_negbin_pmf(y, mu_prop, kappa) -
                    dist::log_negbin_pmf(y, mu_cur, kappa);
          }
        }
      }
    }

    const double alpha = std::min(1.0, std::exp(logr));
    const bool accept = logr >= 0.0 || log_uniform(rng) < logr;
    if (accept) {
      s.beta[j] = beta_prop;
      s.fe[j] = lin_mu_prop;
      if (joint) {
        s.gamma[j] = gamma_prop;
        s.log_nu[j] = lin_nu_prop;
        s.nu[j] = lin_nu_prop.array().exp();
      }
    }
    if (adapt) {
      ++ram.attempted_adapt;
      if (accept) ++ram.accepted_adapt;
      ram_adapt(ram, u, alpha, cfg_.target_acceptance,
                cfg_.adaptation_decay_exponent);
    } else {
      ++ram.attempted_fixed;
      if (accept) ++ram.accepted_fixed;
    }
  }

  // likelihood-free columns are conjugate: refresh them from the prior
  for (int c : dead_cols_[j]) {
    s.beta[j](c) = priors_.beta_mean +
                   normal(rng) / std::sqrt(priors_.beta_precision);
    if (joint)
      s.gamma[j](c) = priors_.gamma_mean +
                      normal(rng) / std::sqrt(priors_.gamma_precision);
  }
}

void McmcEngine::update_nb_dispersion(State& s, int outcome, Rng& rng,
                                      bool adapt) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int j = outcome;
  Eigen::VectorXd u(1);
  u(0) = normal(rng);
  const double lk_cur = s.log_kappa[j];
  const double lk_prop = lk_cur + s.ram_kappa[j].factor(0, 0) * u(0);

  // vague lognormal prior: log kappa ~ N(0, 10)
  double logr = (lk_cur * lk_cur - lk_prop * lk_prop) / 20.0;
  if (!cfg_.prior_only && std::abs(lk_prop) <= 25.0) {
    const double k_cur = std::exp(lk_cur);
    const double k_prop = std::exp(lk_prop);
    for (long i = 0; i < n_; ++i) {
      const double mu = std::exp(s.fe[j](i) + s.b(i, j));
      logr += dist::log_negbin_pmf(y_[j][i], mu, k_prop) -
              dist::log_negbin_pmf(y_[j][i], mu, k_cur);
    }
  } else if (!cfg_.prior_only) {
    logr = -std::numeric_limits<double>::infinity();
  }

  const double alpha = std::min(1.0, std::exp(logr));
  const bool accept = logr >= 0.0 || log_uniform(rng) < logr;
  if (accept) s.log_kappa[j] = lk_prop;
  RamState& ram = s.ram_kappa[j];
  if (adapt) {
    ++ram.attempted_adapt;
    if (accept) ++ram.accepted_adapt;
    ram_adapt(ram, u, alpha, cfg_.target_acceptance,
              cfg_.adaptation_decay_exponent);
  } else {
    ++ram.attempted_fixed;
    if (accept) ++ram.accepted_fixed;
  }
}

void McmcEngine::update_covariance(State& s, Rng& rng) {
  s.cov = draw_covariance(s.b, priors_, rng);
  s.re_prior = dist::Mvn2(s.cov);
}

PosteriorDraws McmcEngine::run(int chain_id) {
  State s;
  init_state(s);
  Rng rng = make_rng(cfg_.seed, static_cast<std::uint64_t>(chain_id));

  const std::int64_t retained = cfg_.retained_per_chain();
  const int b_factor =
      cfg_.store_random_effects_full ? 1 : cfg_.random_effect_thin_factor;
  const long b_rows = retained > 0 ? (retained + b_factor - 1) / b_factor : 0;

  PosteriorDraws out;
  out.kind = kind_;
  out.shape_pinned = cfg_.pin_shape_to_poisson;
  out.seed = cfg_.seed;
  out.chain_id = chain_id;
  out.n_iterations = cfg_.n_iterations;
  out.burn_in = cfg_.burn_in;
  out.thin = cfg_.thin;
  const bool update_gamma =
      kind_ == ModelKind::cmp && !cfg_.pin_shape_to_poisson;
  out.beta_home.resize(retained, p_);
  out.beta_away.resize(retained, p_);
  if (update_gamma) {
    out.gamma_home.resize(retained, p_);
    out.gamma_away.resize(retained, p_);
  }
  out.cov_entries.resize(retained, 3);
  if (kind_ == ModelKind::negative_binomial) out.nb_dispersion.resize(retained, 2);
  out.random_effects.resize(b_rows, 2 * n_);
  out.random_effect_rows.reserve(b_rows);

  long kept = 0;
  for (std::int64_t t = 1; t <= cfg_.n_iterations; ++t) {
    const bool adapt = t <= cfg_.burn_in;
    update_random_effects(s, rng, adapt);
    for (int j = 0; j < 2; ++j) update_coefficients(s, j, rng, adapt);
    if (kind_ == ModelKind::negative_binomial)
      for (int j = 0; j < 2; ++j) update_nb_dispersion(s, j, rng, adapt);
    update_covariance(s, rng);

    if (t > cfg_.burn_in && (t - cfg_.burn_in) % cfg_.thin == 0) {
      out.beta_home.row(kept) = s.beta[0].transpose();
      out.beta_away.row(kept) = s.beta[1].transpose();
      if (update_gamma) {
        out.gamma_home.row(kept) = s.gamma[0].transpose();
        out.gamma_away.row(kept) = s.gamma[1].transpose();
      }
      out.cov_entries(kept, 0) = s.cov(0, 0);
      out.cov_entries(kept, 1) = s.cov(0, 1);
      out.cov_entries(kept, 2) = s.cov(1, 1);
      if (kind_ == ModelKind::negative_binomial) {
        out.nb_dispersion(kept, 0) = std::exp(s.log_kappa[0]);
        out.nb_dispersion(kept, 1) = std::exp(s.log_kappa[1]);
      }
      if (kept % b_factor == 0) {
        const long row = static_cast<long>(out.random_effect_rows.size());
        for (long i = 0; i < n_; ++i) {
          out.random_effects(row, 2 * i) = s.b(i, 0);
          out.random_effects(row, 2 * i + 1) = s.b(i, 1);
        }
        out.random_effect_rows.push_back(kept);
      }
      ++kept;
    }
  }

  const auto family_rate = [](const std::vector<RamState>& rams) {
    std::int64_t accepted = 0, attempted = 0;
    for (const auto& r : rams) {
      accepted += r.accepted_fixed;
      attempted += r.attempted_fixed;
    }
    return attempted > 0 ? static_cast<double>(accepted) / attempted : 0.0;
  };
  out.acceptance_rates["b"] = s.ram_b.fixed_acceptance_rate();
  const char* coef_key[2] = {update_gamma ? "coefficients_home" : "beta_home",
                             update_gamma ? "coefficients_away" : "beta_away"};
  out.acceptance_rates[coef_key[0]] = family_rate(s.ram_coef[0]);
  out.acceptance_rates[coef_key[1]] = family_rate(s.ram_coef[1]);
  if (kind_ == ModelKind::negative_binomial) {
    out.acceptance_rates["kappa_home"] = s.ram_kappa[0].fixed_acceptance_rate();
    out.acceptance_rates["kappa_away"] = s.ram_kappa[1].fixed_acceptance_rate();
  }
  return out;
}

PosteriorDraws run_chain(ModelKind kind, const std::vector<GameRecord>& games,
                         const DesignBundle& design, const PriorSpec& priors,
                         const ChainConfig& config, int chain_id) {
  McmcEngine engine(kind, games, design, priors, config);
  return engine.run(chain_id);
}

std::vector<PosteriorDraws> run_chains(ModelKind kind,
                                       const std::vector<GameRecord>& games,
                                       const DesignBundle& design,
                                       const PriorSpec& priors,
                                       const ChainConfig& config) {
  config.validate();
  std::vector<std::future<PosteriorDraws>> futures;
  futures.reserve(config.n_chains);
  for (int c = 0; c < config.n_chains; ++c) {
    futures.push_back(std::async(std::launch::async, [&, c] {
      return run_chain(kind, games, design, priors, config, c);
    }));
  }
  std::vector<PosteriorDraws> out;
  out.reserve(config.n_chains);
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace bicmp::mcmc
