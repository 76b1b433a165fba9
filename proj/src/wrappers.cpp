#include "gpa/wrappers.hpp"

#include <stdexcept>
#include <string>

namespace gpa {

DilocoState::DilocoState(ParamVector x0, double momentum_, double outer_lr_,
                         std::int64_t inner_steps_, std::unique_ptr<BaseOptimizer> base_,
                         double weight_decay_, ClipSpec clip_)
    : inner(x0),
      outer(std::move(x0)),
      outer_momentum(ParamVector::Zero(inner.size())),
      momentum(momentum_),
      outer_lr(outer_lr_),
      inner_steps(inner_steps_),
      weight_decay(weight_decay_),
      clip(clip_),
      base(std::move(base_)) {
  if (!(momentum >= 0.0 && momentum <= 1.0)) {
    throw std::domain_error("diloco: momentum must be in [0, 1]");
  }
  if (!(outer_lr > 0.0)) throw std::invalid_argument("diloco: outer_lr must be > 0");
  if (inner_steps < 1) throw std::invalid_argument("diloco: inner_steps must be >= 1");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("diloco: weight_decay must be >= 0");
  clip.validate();
  if (!base) throw std::invalid_argument("diloco: base optimizer required");
  require_finite(inner, "diloco init");
}

void diloco_step(DilocoState& state, const GradOracle& oracle, double lr) {
  if (!(lr >= 0.0)) throw std::invalid_argument("diloco: lr must be >= 0");
  state.step += 1;
  const ParamVector g = oracle(state.inner);
  if (!g.allFinite()) {
    throw std::runtime_error("diloco: non-finite gradient at step " + std::to_string(state.step));
  }
  const ParamVector d = state.base->direction(clip_gradient(g, state.clip));
  state.inner = (1.0 - lr * state.weight_decay) * state.inner - lr * d;
  if (state.step % state.inner_steps == 0) {
    const ParamVector pseudo_grad = state.outer - state.inner;
    if (!pseudo_grad.allFinite()) {
      throw std::runtime_error("diloco: non-finite pseudo-gradient at step " +
                               std::to_string(state.step));
    }
    state.outer_momentum = state.momentum * state.outer_momentum + pseudo_grad;
    state.outer -= state.outer_lr * (state.momentum * state.outer_momentum + pseudo_grad);
    state.inner = state.outer;
  }
}

ScheduleFreeState::ScheduleFreeState(ParamVector x0, double interp_, double lr_,
                                     std::unique_ptr<BaseOptimizer> base_, double weight_decay_,
                                     ClipSpec clip_, std::int64_t warmup_steps_)
    : avg(x0),
      base_point(std::move(x0)),
      interp(interp_),
      lr(lr_),
      warmup_steps(warmup_steps_),
      weight_decay(weight_decay_),
      clip(clip_),
      base(std::move(base_)) {
  if (!(interp >= 0.0 && interp <= 1.0)) {
    throw std::domain_error("schedule_free: interp must be in [0, 1]");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("schedule_free: lr must be > 0");
  if (warmup_steps < 0) throw std::invalid_argument("schedule_free: warmup_steps must be >= 0");
  if (!(weight_decay >= 0.0)) {
    throw std::invalid_argument("schedule_free: weight_decay must be >= 0");
  }
  clip.validate();
  if (!base) throw std::invalid_argument("schedule_free: base optimizer required");
  require_finite(avg, "schedule_free init");
}

void schedule_free_step(ScheduleFreeState& state, const GradOracle& oracle) {
  const std::int64_t t = state.step;
  const double gamma = t <= state.warmup_steps
                           ? state.lr * static_cast<double>(t) / static_cast<double>(state.warmup_steps)
                           : state.lr;
  const ParamVector probe = blend(state.interp, state.avg, state.base_point);
  const ParamVector g = oracle(probe);
  if (!g.allFinite()) {
    throw std::runtime_error("schedule_free: non-finite gradient at step " + std::to_string(t));
  }
  const ParamVector d = state.base->direction(clip_gradient(g, state.clip));
  state.base_point = (1.0 - gamma * state.weight_decay) * state.base_point - gamma * d;
  const double keep = static_cast<double>(t) / static_cast<double>(t + 1);
  state.avg = blend(keep, state.avg, state.base_point);
  state.step += 1;
  if (!state.avg.allFinite() || !state.base_point.allFinite()) {
    throw std::runtime_error("schedule_free: non-finite iterate at step " + std::to_string(t));
  }
}

}  // namespace gpa
