#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace bicmp::mcmc {

// Robust adaptive Metropolis proposal state (Vihola 2012): the lower
// triangular factor S of the proposal covariance S S', plus acceptance
// bookkeeping split into the adaptation and post-adaptation phases.
struct RamState {
  Eigen::MatrixXd factor;
  std::int64_t adapt_steps = 0;
  std::int64_t accepted_adapt = 0;
  std::int64_t attempted_adapt = 0;
  std::int64_t accepted_fixed = 0;
  std::int64_t attempted_fixed = 0;
  std::int64_t clamp_events = 0;

  double fixed_acceptance_rate() const {
    return attempted_fixed > 0
               ? static_cast<double>(accepted_fixed) / attempted_fixed
               : 0.0;
  }
};

RamState make_ram(int dim, double initial_scale);

// S S' <- S (I + eta_n (alpha - target) u u' / |u|^2) S' with
// eta_n = min(1, dim * n^(-decay)). If the refactorization fails the update
// is clamped (halved) and clamp_events is bumped.
void ram_adapt(RamState& state, const Eigen::VectorXd& direction,
               double accept_prob, double target, double decay);

}  // namespace bicmp::mcmc
