#include "bicmp/cmp.hpp"

#include <array>
#include <cmath>

namespace bicmp::cmp {

namespace {

constexpr int kLogFactCacheSize = 4096;

const double* log_fact_table() {
  static const auto table = [] {
    auto* t = new std::array<double, kLogFactCacheSize>();
    (*t)[0] = 0.0;
    for (int i = 1; i < kLogFactCacheSize; ++i)
      (*t)[i] = (*t)[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  return table->data();
}

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(b) && b < 0) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

double log_factorial(std::int64_t y) {
  if (y < 0) throw std::domain_error("log_factorial: negative argument");
  if (y < kLogFactCacheSize) return log_fact_table()[y];
  return std::lgamma(static_cast<double>(y) + 1.0);
}

double log_kernel(std::int64_t y, const CmpParams& p) {
  if (y < 0) throw std::domain_error("log_kernel: y must be nonnegative");
  return p.nu * (static_cast<double>(y) * std::log(p.mu) - log_factorial(y));
}

double log_normalizing_constant(const CmpParams& p, double rel_tol) {
  if (!(rel_tol > 0.0) || !(rel_tol < 1.0))
    throw std::domain_error("log_normalizing_constant: rel_tol must be in (0,1)");
  constexpr std::int64_t kTermCap = 1'000'000;
  const double log_mu = std::log(p.mu);
  const double log_tol = std::log(rel_tol);
  const auto mode = static_cast<std::int64_t>(std::floor(p.mu));
  double log_sum = 0.0;  // y = 0 term: q(0) = 1
  for (std::int64_t y = 1; y <= kTermCap; ++y) {
    const double log_term =
        p.nu * (static_cast<double>(y) * log_mu - log_factorial(y));
    log_sum = log_add_exp(log_sum, log_term);
    if (y > mode && log_term < log_tol + log_sum) return log_sum;
  }
  throw NonConvergenceError(
      "log_normalizing_constant: series did not meet the tail criterion "
      "within 1e6 terms (mu=" +
      std::to_string(p.mu) + ", nu=" + std::to_string(p.nu) + ")");
}

double approx_mean(const CmpParams& p) {
  return p.mu + 0.5 / p.nu - 0.5;
}

double approx_variance(const CmpParams& p) { return p.mu / p.nu; }

double pmf_oracle(std::int64_t y, const CmpParams& p, double rel_tol) {
  return std::exp(log_kernel(y, p) - log_normalizing_constant(p, rel_tol));
}

CmpSampler::CmpSampler(const CmpParams& p)
    : log_mu_(std::log(p.mu)), mu_(p.mu), nu_(p.nu) {
  init();
}

CmpSampler::CmpSampler(double log_mu, double nu)
    : log_mu_(log_mu), mu_(std::exp(log_mu)), nu_(nu) {
  if (!std::isfinite(log_mu_))
    throw std::domain_error("CmpSampler: log_mu must be finite");
  if (!std::isfinite(nu_) || nu_ <= 0.0)
    throw std::domain_error("CmpSampler: nu must be positive");
  init();
}

void CmpSampler::init() {
  if (nu_ >= 1.0) {
    kind_ = EnvelopeKind::poisson_envelope;
    const auto mode = static_cast<std::int64_t>(std::floor(mu_));
    log_w_mode_ = static_cast<double>(mode) * log_mu_ - log_factorial(mode);
    // q(y)/w(y) = w(y)^(nu-1) is maximized at the mode for nu >= 1.
    log_bound_ = (nu_ - 1.0) * log_w_mode_;
    log_norm_ = mu_;  // Z of the Poisson kernel
    pois_param_ = std::poisson_distribution<std::int64_t>::param_type(mu_);
  } else {
    kind_ = EnvelopeKind::geometric_envelope;
    geo_p_ = 2.0 * nu_ / (2.0 * mu_ * nu_ + 1.0 + nu_);
    log1m_p_ = std::log1p(-geo_p_);
    // h(y) = q(y) / (1-p)^y has increments (mu/(y+1))^nu / (1-p); the last
    // rising index is ceil(mu / (1-p)^(1/nu)) - 1.
    const double peak = mu_ * std::exp(-log1m_p_ / nu_);
    const auto y_star =
        std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(peak)) - 1);
    log_bound_ = nu_ * (static_cast<double>(y_star) * log_mu_ -
                        log_factorial(y_star)) -
                 static_cast<double>(y_star) * log1m_p_;
    log_norm_ = -std::log(geo_p_);
    log_w_mode_ = 0.0;
  }
}

RejectionStats CmpSampler::stats_template() const {
  RejectionStats s;
  s.envelope_log_bound = log_bound_;
  s.envelope_log_norm = log_norm_;
  s.envelope_kind = kind_;
  return s;
}

std::int64_t CmpSampler::draw(Rng& rng, RejectionStats* stats) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (kind_ == EnvelopeKind::poisson_envelope) {
    std::poisson_distribution<std::int64_t> pois(pois_param_);
    for (std::int64_t attempt = 1; attempt <= kStallCap; ++attempt) {
      const std::int64_t y = pois(rng);
      // log accept prob = (nu-1) (w(y) - w(mode)) with w the Poisson log kernel
      const double log_acc =
          (nu_ - 1.0) * (static_cast<double>(y) * log_mu_ - log_factorial(y) -
                         log_w_mode_);
      if (log_acc >= 0.0 || std::log(unif(rng)) < log_acc) {
        if (stats) {
          stats->draws_attempted += attempt;
          stats->acceptances += 1;
        }
        return y;
      }
    }
  } else {
    std::geometric_distribution<std::int64_t> geo(geo_p_);
    for (std::int64_t attempt = 1; attempt <= kStallCap; ++attempt) {
      const std::int64_t y = geo(rng);
      const double log_acc =
          nu_ * (static_cast<double>(y) * log_mu_ - log_factorial(y)) -
          (log_bound_ + static_cast<double>(y) * log1m_p_);
      if (log_acc >= 0.0 || std::log(unif(rng)) < log_acc) {
        if (stats) {
          stats->draws_attempted += attempt;
          stats->acceptances += 1;
        }
        return y;
      }
    }
  }
  throw SamplerStallError("CmpSampler: no acceptance within " +
                          std::to_string(kStallCap) + " attempts (log_mu=" +
                          std::to_string(log_mu_) + ", nu=" +
                          std::to_string(nu_) + ")");
}

std::int64_t CmpSampler::attempts_for_acceptances(std::int64_t r,
                                                  Rng& rng) const {
  if (r < 1) throw std::domain_error("attempts_for_acceptances: r must be >= 1");
  RejectionStats stats;
  for (std::int64_t k = 0; k < r; ++k) draw(rng, &stats);
  return stats.draws_attempted;
}

std::pair<std::int64_t, RejectionStats> sample(const CmpParams& p, Rng& rng) {
  const CmpSampler sampler(p);
  RejectionStats stats = sampler.stats_template();
  const std::int64_t y = sampler.draw(rng, &stats);
  return {y, stats};
}

}  // namespace bicmp::cmp
