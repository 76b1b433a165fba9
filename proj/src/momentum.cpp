#include "gpa/momentum.hpp"

#include <stdexcept>
#include <string>

namespace gpa {

namespace {

void check_params(double mu, double lr) {
  if (!(mu >= 0.0 && mu < 1.0)) throw std::domain_error("momentum: mu must be in [0, 1)");
  if (!(lr > 0.0)) throw std::invalid_argument("momentum: lr must be > 0");
}

ParamVector eval_grad(const GradOracle& oracle, const ParamVector& point, std::int64_t step) {
  ParamVector g = oracle(point);
  if (!g.allFinite()) {
    throw std::runtime_error("non-finite gradient at step " + std::to_string(step));
  }
  return g;
}

}  // namespace

NesterovModernState::NesterovModernState(ParamVector x0, double mu_, double lr_)
    : iterate(std::move(x0)), buffer(ParamVector::Zero(iterate.size())), mu(mu_), lr(lr_) {
  check_params(mu, lr);
}

NesterovSutskeverState::NesterovSutskeverState(ParamVector x0, double mu_, double lr_)
    : iterate(std::move(x0)), buffer(ParamVector::Zero(iterate.size())), mu(mu_), lr(lr_) {
  check_params(mu, lr);
}

NesterovPrimalState::NesterovPrimalState(ParamVector x0, double mu_, double lr_)
    : avg(x0), base(std::move(x0)), mu(mu_), lr(lr_) {
  check_params(mu, lr);
}

PolyakPrimalState::PolyakPrimalState(ParamVector x0, double mu_, double lr_)
    : avg(x0), base(std::move(x0)), mu(mu_), lr(lr_) {
  check_params(mu, lr);
}

PolyakModernState::PolyakModernState(ParamVector x0, double mu_, double lr_)
    : iterate(std::move(x0)), buffer(ParamVector::Zero(iterate.size())), mu(mu_), lr(lr_) {
  check_params(mu, lr);
}

void nesterov_modern_step(NesterovModernState& state, const GradOracle& oracle) {
  state.step += 1;
  const ParamVector g = eval_grad(oracle, state.iterate, state.step);
  state.buffer = state.mu * state.buffer + g;
  state.iterate -= state.lr * (state.mu * state.buffer + g);
}

void nesterov_sutskever_step(NesterovSutskeverState& state, const GradOracle& oracle) {
  state.step += 1;
  const ParamVector lookahead = state.iterate + state.mu * state.buffer;
  const ParamVector g = eval_grad(oracle, lookahead, state.step);
  state.buffer = state.mu * state.buffer - state.lr * g;
  state.iterate += state.buffer;
}

void nesterov_primal_step(NesterovPrimalState& state, const GradOracle& oracle) {
  state.step += 1;
  const ParamVector probe = blend(state.mu, state.avg, state.base);
  const ParamVector g = eval_grad(oracle, probe, state.step);
  state.base -= state.lr * g;
  state.avg = blend(state.mu, state.avg, state.base);
}

void polyak_primal_step(PolyakPrimalState& state, const GradOracle& oracle) {
  state.step += 1;
  const ParamVector g = eval_grad(oracle, state.avg, state.step);
  state.base -= state.lr * g;
  state.avg = blend(state.mu, state.avg, state.base);
}

void polyak_modern_step(PolyakModernState& state, const GradOracle& oracle) {
  state.step += 1;
  const ParamVector g = eval_grad(oracle, state.iterate, state.step);
  state.buffer = state.mu * state.buffer + g;
  state.iterate -= state.lr * state.buffer;
}

std::pair<double, double> map_primal_to_modern(double mu, double lr_primal) {
  if (!(mu >= 0.0 && mu < 1.0)) throw std::domain_error("map_primal_to_modern: mu must be in [0, 1)");
  if (!(lr_primal > 0.0)) throw std::invalid_argument("map_primal_to_modern: lr must be > 0");
  return {mu, (1.0 - mu) * lr_primal};
}

ParamVector recover_modern_buffer(const ParamVector& x_prev, const ParamVector& x_next,
                                  double mu, double lr_primal) {
  if (!(mu >= 0.0 && mu < 1.0)) throw std::domain_error("recover_modern_buffer: mu must be in [0, 1)");
  if (!(lr_primal > 0.0)) throw std::invalid_argument("recover_modern_buffer: lr must be > 0");
  require_same_dim(x_prev, x_next, "recover_modern_buffer");
  return (x_prev - x_next) / ((1.0 - mu) * lr_primal);
}

}  // namespace gpa
