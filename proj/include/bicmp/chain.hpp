#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bicmp/cmp.hpp"
#include "bicmp/data.hpp"
#include "bicmp/design.hpp"
#include "bicmp/distributions.hpp"
#include "bicmp/model.hpp"
#include "bicmp/ram.hpp"
#include "bicmp/rng.hpp"

namespace bicmp::mcmc {

enum class ModelKind { cmp, poisson, negative_binomial };

std::string to_string(ModelKind kind);

struct ChainConfig {
  std::int64_t n_iterations = 30000;
  std::int64_t burn_in = 10000;
  std::int64_t thin = 1;
  double target_acceptance = 0.40;
  std::uint64_t seed = 1;
  int n_chains = 1;
  double adaptation_decay_exponent = 2.0 / 3.0;
  double initial_proposal_scale = 0.1;
  // Random effects are bulky; by default they are stored every
  // random_effect_thin_factor-th retained draw.
  int random_effect_thin_factor = 10;
  bool store_random_effects_full = false;
  // Coefficient families update in a sequence of sub-blocks of this size
  // (0 = one full-vector block). Small sub-blocks keep the auxiliary-data
  // noise in the Exchange ratio at a usable level.
  int coefficient_block_size = 8;
  // Fixes gamma at zero (nu = 1) and skips shape updates; the model then
  // reduces to the Poisson mean structure while still using Exchange steps.
  bool pin_shape_to_poisson = false;
  // Drops every likelihood term so the sweep targets the prior; used to
  // validate the machinery against known moments.
  bool prior_only = false;

  void validate() const;
  std::int64_t retained_per_chain() const {
    return (n_iterations - burn_in) / thin;
  }
};

struct PosteriorDraws {
  ModelKind kind = ModelKind::cmp;
  bool shape_pinned = false;
  Eigen::MatrixXd beta_home, beta_away;    // retained x p
  Eigen::MatrixXd gamma_home, gamma_away;  // retained x p (CMP only)
  Eigen::MatrixXd cov_entries;             // retained x 3: d11 d12 d22
  Eigen::MatrixXd nb_dispersion;           // retained x 2 (NB only)
  Eigen::MatrixXd random_effects;          // stored rows x 2n, b[i*2+j]
  std::vector<long> random_effect_rows;    // retained index of each stored row
  std::map<std::string, double> acceptance_rates;  // post-adaptation
  std::uint64_t seed = 0;
  int chain_id = 0;
  std::int64_t n_iterations = 0, burn_in = 0, thin = 1;

  long n_draws() const { return beta_home.rows(); }
  const Eigen::MatrixXd& beta(int j) const { return j == 0 ? beta_home : beta_away; }
  const Eigen::MatrixXd& gamma(int j) const { return j == 0 ? gamma_home : gamma_away; }
  bool has_gamma() const { return gamma_home.size() > 0; }
};

// Scalar parameter names in chain-file order: beta blocks, gamma blocks (CMP),
// covariance entries, NB dispersions.
std::vector<std::string> chain_column_names(ModelKind kind,
                                            const DesignBundle& design,
                                            bool shape_pinned = false);

// --- Z-free Exchange acceptance ratios (pure; exercised directly in tests) ---

inline double cmp_log_kernel_term(std::int64_t y, double log_mu, double nu) {
  return nu * (static_cast<double>(y) * log_mu - cmp::log_factorial(y));
}

// One game's random-effect move: observed kernels at proposed vs current b,
// prior ratio, and the auxiliary kernels with roles reversed.
double exchange_log_ratio_random_effect(
    const std::array<std::int64_t, 2>& y_obs,
    const std::array<std::int64_t, 2>& y_aux,
    const std::array<double, 2>& log_mu_cur,
    const std::array<double, 2>& log_mu_prop, const std::array<double, 2>& nu,
    const Eigen::Vector2d& b_cur, const Eigen::Vector2d& b_prop,
    const dist::Mvn2& re_prior);

// One coefficient block (a full beta_j or gamma_j vector).
double exchange_log_ratio_block(const std::vector<std::int64_t>& y_obs,
                                const std::vector<std::int64_t>& y_aux,
                                const Eigen::VectorXd& log_mu_cur,
                                const Eigen::VectorXd& log_mu_prop,
                                const Eigen::VectorXd& nu_cur,
                                const Eigen::VectorXd& nu_prop,
                                double prior_log_cur, double prior_log_prop);

// Conjugate covariance draw: D^-1 ~ Wishart(n + v0, [R0^-1 + sum b b']^-1).
Eigen::Matrix2d draw_covariance(const Eigen::MatrixXd& random_effects,
                                const PriorSpec& priors, Rng& rng);

// One MCMC chain: CMP via Exchange steps, Poisson/NB via exact Metropolis
// ratios on the same sweep (b blocks, beta blocks, [gamma | kappa], D).
class McmcEngine {
 public:
  McmcEngine(ModelKind kind, const std::vector<GameRecord>& games,
             const DesignBundle& design, const PriorSpec& priors,
             const ChainConfig& config);

  PosteriorDraws run(int chain_id);

 private:
  struct State;
  void init_state(State& s) const;
  Eigen::MatrixXd laplace_information(int outcome, bool shape_family) const;
  void update_random_effects(State& s, Rng& rng, bool adapt);
  void update_coefficients(State& s, int outcome, Rng& rng, bool adapt);
  void update_nb_dispersion(State& s, int outcome, Rng& rng, bool adapt);
  void update_covariance(State& s, Rng& rng);

  ModelKind kind_;
  DesignBundle design_;
  PriorSpec priors_;
  ChainConfig cfg_;
  long n_ = 0;
  int p_ = 0;
  std::array<std::vector<std::int64_t>, 2> y_;
  std::array<Eigen::VectorXd, 2> y_real_;
  std::array<double, 2> mean_score_{};
  // per outcome: design columns with/without any nonzero entry
  std::array<std::vector<int>, 2> active_cols_;
  std::array<std::vector<int>, 2> dead_cols_;
  // (begin, length) sub-blocks over active_cols_ per outcome
  std::array<std::vector<std::pair<int, int>>, 2> chunks_;
};

PosteriorDraws run_chain(ModelKind kind, const std::vector<GameRecord>& games,
                         const DesignBundle& design, const PriorSpec& priors,
                         const ChainConfig& config, int chain_id = 0);

// Runs config.n_chains chains (in parallel when possible); chain c uses the
// substream (seed, c), so results do not depend on scheduling.
std::vector<PosteriorDraws> run_chains(ModelKind kind,
                                       const std::vector<GameRecord>& games,
                                       const DesignBundle& design,
                                       const PriorSpec& priors,
                                       const ChainConfig& config);

}  // namespace bicmp::mcmc
