#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "bicmp/rng.hpp"

namespace bicmp::cmp {

// Raised when the rejection loop exceeds its attempt cap. Expected attempt
// counts are single digits, so a stall means the envelope is broken.
class SamplerStallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the normalizing-constant series hits its term cap before the
// tail criterion holds.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters of a CMP(mu, nu) law: kernel q(y) = (mu^y / y!)^nu.
// mu > 0 centers the distribution (the mode is floor(mu)); nu controls the
// dispersion (nu < 1 over-, nu = 1 Poisson, nu > 1 under-dispersed).
// nu = 0 is rejected here: the distribution is improper for mu >= 1.
struct CmpParams {
  double mu;
  double nu;

  CmpParams(double mu_in, double nu_in) : mu(mu_in), nu(nu_in) {
    if (!std::isfinite(mu) || mu <= 0.0)
      throw std::domain_error("CmpParams: mu must be positive, got " +
                              std::to_string(mu));
    if (!std::isfinite(nu) || nu <= 0.0)
      throw std::domain_error("CmpParams: nu must be positive, got " +
                              std::to_string(nu));
  }
};

enum class EnvelopeKind { poisson_envelope, geometric_envelope };

// Bookkeeping from the rejection sampler. envelope_log_bound is log B_{f/g},
// the bound on q(y) over the envelope *kernel*; envelope_log_norm is log Z_g
// of that kernel, so q(y) <= B_{f/g} * Z_g * g(y) with g the envelope pmf and
// the per-attempt acceptance probability equals Z_f / (B_{f/g} Z_g).
struct RejectionStats {
  std::int64_t draws_attempted = 0;
  std::int64_t acceptances = 0;
  double envelope_log_bound = 0.0;
  double envelope_log_norm = 0.0;
  EnvelopeKind envelope_kind = EnvelopeKind::poisson_envelope;
};

// log(y!) with a cached table for the small counts that dominate score data.
double log_factorial(std::int64_t y);

// log q(y | mu, nu) = nu * (y log mu - log y!).
double log_kernel(std::int64_t y, const CmpParams& p);

// log Z(mu, nu), summed in log space from y = 0 past the mode until the next
// term falls below rel_tol times the running sum. Term cap 10^6.
double log_normalizing_constant(const CmpParams& p, double rel_tol = 1e-12);

// Asymptotic moment approximations: E[Y] ~ mu + 1/(2 nu) - 1/2, Var ~ mu/nu.
double approx_mean(const CmpParams& p);
double approx_variance(const CmpParams& p);

// exp(log_kernel - log Z); truncated-series reference used by the tests and
// the tabulated diagnostics.
double pmf_oracle(std::int64_t y, const CmpParams& p, double rel_tol = 1e-12);

// Exact sampler with two envelopes: Poisson(mu) proposals for nu >= 1,
// geometric proposals for nu < 1 with success probability
// p = 2 nu / (2 mu nu + 1 + nu). Envelope constants are precomputed so the
// object can be reused for repeated draws at fixed parameters.
class CmpSampler {
 public:
  static constexpr std::int64_t kStallCap = 10'000'000;

  explicit CmpSampler(const CmpParams& p);
  // Cheaper entry point for callers that already hold the linear predictor.
  CmpSampler(double log_mu, double nu);

  // One exact draw; attempts/acceptance are accumulated into *stats if given.
  std::int64_t draw(Rng& rng, RejectionStats* stats = nullptr) const;

  // Total attempts needed for r acceptances (the accepted values are
  // discarded); used by the unbiased 1/Z estimator.
  std::int64_t attempts_for_acceptances(std::int64_t r, Rng& rng) const;

  double envelope_log_bound() const { return log_bound_; }
  double envelope_log_norm() const { return log_norm_; }
  EnvelopeKind kind() const { return kind_; }
  RejectionStats stats_template() const;

 private:
  void init();

  double log_mu_;
  double mu_;
  double nu_;
  EnvelopeKind kind_;
  double log_bound_;  // log B_{f/g} over the envelope kernel
  double log_norm_;   // log Z_g of the envelope kernel
  // Poisson envelope: nu >= 1, kernel w(y) = mu^y / y!, Z_g = e^mu.
  double log_w_mode_;
  std::poisson_distribution<std::int64_t>::param_type pois_param_;
  // Geometric envelope: nu < 1, kernel (1-p)^y, Z_g = 1/p.
  double geo_p_ = 0.0;
  double log1m_p_ = 0.0;
};

// Convenience one-shot draw mirroring the reusable sampler.
std::pair<std::int64_t, RejectionStats> sample(const CmpParams& p, Rng& rng);

}  // namespace bicmp::cmp
