#include "gpa/base_opt.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpa {

AdamWState::AdamWState(Eigen::Index dim, double beta1_, double beta2_, double eps_)
    : exp_avg(ParamVector::Zero(dim)),
      exp_avg_sq(ParamVector::Zero(dim)),
      beta1(beta1_),
      beta2(beta2_),
      eps(eps_) {
  validate();
}

void AdamWState::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("adamw: beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("adamw: beta2 must be in [0, 1)");
  if (!(eps >= 0.0)) throw std::invalid_argument("adamw: eps must be >= 0");
}

ParamVector sgd_direction(const ParamVector& grad, SgdState&) {
  require_finite(grad, "sgd_direction");
  return grad;
}

ParamVector adamw_direction(const ParamVector& grad, AdamWState& state) {
  require_finite(grad, "adamw_direction");
  require_same_dim(grad, state.exp_avg, "adamw_direction");
  if (state.step == std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("adamw_direction: step counter overflow");
  }
  state.step += 1;
  state.exp_avg = state.beta1 * state.exp_avg + (1.0 - state.beta1) * grad;
  state.exp_avg_sq = state.beta2 * state.exp_avg_sq + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  ParamVector dir(grad.size());
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    const double m_hat = state.exp_avg[i] / bias1;
    const double v_hat = state.exp_avg_sq[i] / bias2;
    const double denom = std::sqrt(v_hat) + state.eps;
    // denom can only vanish with eps = 0 and an all-zero gradient history,
    // in which case m_hat is zero as well.
    dir[i] = denom > 0.0 ? m_hat / denom : 0.0;
  }
  return dir;
}

ParamVector SgdOptimizer::direction(const ParamVector& grad) {
  return sgd_direction(grad, state_);
}

std::unique_ptr<BaseOptimizer> SgdOptimizer::clone() const {
  return std::make_unique<SgdOptimizer>(*this);
}

AdamWOptimizer::AdamWOptimizer(Eigen::Index dim, double beta1, double beta2, double eps)
    : state_(dim, beta1, beta2, eps) {}

AdamWOptimizer::AdamWOptimizer(AdamWState state) : state_(std::move(state)) {}

ParamVector AdamWOptimizer::direction(const ParamVector& grad) {
  return adamw_direction(grad, state_);
}

std::unique_ptr<BaseOptimizer> AdamWOptimizer::clone() const {
  return std::make_unique<AdamWOptimizer>(*this);
}

}  // namespace gpa
