#include "bicmp/ram.hpp"

#include <cmath>
#include <stdexcept>

namespace bicmp::mcmc {

RamState make_ram(int dim, double initial_scale) {
  if (dim < 1 || !(initial_scale > 0.0))
    throw std::invalid_argument("make_ram: bad dimension or scale");
  RamState s;
  s.factor = initial_scale * Eigen::MatrixXd::Identity(dim, dim);
  return s;
}

void ram_adapt(RamState& state, const Eigen::VectorXd& direction,
               double accept_prob, double target, double decay) {
  if (accept_prob < 0.0 || accept_prob > 1.0)
    throw std::invalid_argument("ram_adapt: accept_prob outside [0,1]");
  const double norm2 = direction.squaredNorm();
  if (!(norm2 > 0.0)) return;

  const auto dim = static_cast<double>(state.factor.rows());
  const double n = static_cast<double>(++state.adapt_steps);
  const double eta = std::min(1.0, dim * std::pow(n, -decay));
  double c = eta * (accept_prob - target);
  if (c == 0.0) return;

  const Eigen::VectorXd v = state.factor * direction / std::sqrt(norm2);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd m = state.factor * state.factor.transpose() + c * v * v.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      state.factor = llt.matrixL();
      return;
    }
    c *= 0.5;  // step too aggressive for this geometry
    ++state.clamp_events;
  }
  // keep the previous factor if the update cannot be made PD
}

}  // namespace bicmp::mcmc
