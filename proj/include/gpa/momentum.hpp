#pragma once

#include <cstdint>
#include <utility>

#include "gpa/types.hpp"

namespace gpa {

// Reference implementations of the classical momentum formulations, kept on
// raw gradients and a per-state constant learning rate. The parameter maps
// below translate between the variants; the equivalences they encode only
// hold for constant learning rates.

// Buffer form evaluating the gradient at the current iterate:
//   buffer <- mu * buffer + g(iterate)
//   iterate <- iterate - lr * (mu * buffer + g(iterate))
struct NesterovModernState {
  ParamVector iterate;
  ParamVector buffer;  // zero-initialized
  double mu = 0.0;
  double lr = 0.0;
  std::int64_t step = 0;

  NesterovModernState(ParamVector x0, double mu, double lr);
};

// Buffer form evaluating the gradient at the lookahead point:
//   buffer <- mu * buffer - lr * g(iterate + mu * buffer)
//   iterate <- iterate + buffer
struct NesterovSutskeverState {
  ParamVector iterate;
  ParamVector buffer;
  double mu = 0.0;
  double lr = 0.0;
  std::int64_t step = 0;

  NesterovSutskeverState(ParamVector x0, double mu, double lr);
};

// Three-sequence form: the gradient is taken at an interpolation of the
// averaged iterate and the base iterate, and the averaged iterate tracks an
// exponential moving average of the base sequence.
//   probe = mu * avg + (1 - mu) * base
//   base <- base - lr * g(probe)
//   avg  <- mu * avg + (1 - mu) * base
struct NesterovPrimalState {
  ParamVector avg;   // evaluation sequence, starts equal to base
  ParamVector base;  // raw update sequence
  double mu = 0.0;
  double lr = 0.0;
  std::int64_t step = 0;

  NesterovPrimalState(ParamVector x0, double mu, double lr);
};

// Averaged form of Polyak momentum; the gradient is taken at the averaged
// iterate itself:
//   base <- base - lr * g(avg)
//   avg  <- mu * avg + (1 - mu) * base
struct PolyakPrimalState {
  ParamVector avg;
  ParamVector base;
  double mu = 0.0;
  double lr = 0.0;
  std::int64_t step = 0;

  PolyakPrimalState(ParamVector x0, double mu, double lr);
};

// Buffer form of Polyak momentum:
//   buffer <- mu * buffer + g(iterate)
//   iterate <- iterate - lr * buffer
struct PolyakModernState {
  ParamVector iterate;
  ParamVector buffer;
  double mu = 0.0;
  double lr = 0.0;
  std::int64_t step = 0;

  PolyakModernState(ParamVector x0, double mu, double lr);
};

void nesterov_modern_step(NesterovModernState& state, const GradOracle& oracle);
void nesterov_sutskever_step(NesterovSutskeverState& state, const GradOracle& oracle);
void nesterov_primal_step(NesterovPrimalState& state, const GradOracle& oracle);
void polyak_primal_step(PolyakPrimalState& state, const GradOracle& oracle);
void polyak_modern_step(PolyakModernState& state, const GradOracle& oracle);

// Hyperparameters (mu, lr) of the averaged Nesterov form mapped to the buffer
// form that walks the same gradient-evaluation points: mu is shared and the
// buffer-form learning rate is (1 - mu) * lr.
std::pair<double, double> map_primal_to_modern(double mu, double lr_primal);

// Reconstructs the buffer-form momentum buffer from two consecutive averaged
// iterates: (x_prev - x_next) / ((1 - mu) * lr_primal).
ParamVector recover_modern_buffer(const ParamVector& x_prev, const ParamVector& x_next,
                                  double mu, double lr_primal);

}  // namespace gpa
