#pragma once

#include <cstdint>
#include <memory>

#include "gpa/base_opt.hpp"
#include "gpa/clip.hpp"
#include "gpa/types.hpp"

namespace gpa {

// Single-worker lookahead wrapper: the base optimizer runs on the inner
// weights; every inner_steps steps the displacement of the inner weights from
// the outer weights is treated as a pseudo-gradient and fed through a
// momentum update of the outer weights, after which the inner weights are
// reset onto them. The outer update applies the freshly accumulated buffer
// (momentum * new_buffer + pseudo_grad), matching the buffer-form Nesterov
// update; weight decay acts on the inner steps only.
struct DilocoState {
  ParamVector inner;           // fast weights, where gradients are taken
  ParamVector outer;           // slow weights, returned to the caller
  ParamVector outer_momentum;  // pseudo-gradient buffer, zero-initialized
  double momentum = 0.0;       // [0, 1]
  double outer_lr = 0.0;
  std::int64_t inner_steps = 1;
  double weight_decay = 0.0;
  ClipSpec clip;
  std::int64_t step = 0;
  std::unique_ptr<BaseOptimizer> base;

  DilocoState(ParamVector x0, double momentum, double outer_lr, std::int64_t inner_steps,
              std::unique_ptr<BaseOptimizer> base, double weight_decay = 0.0,
              ClipSpec clip = ClipSpec::disabled());

  // Buffers held alongside the inner weights (outer copy, momentum, base state).
  int aux_buffer_count() const { return 2 + base->aux_buffer_count(); }
};

void diloco_step(DilocoState& state, const GradOracle& oracle, double lr);

// Uniform-averaging wrapper: gradients are taken at an interpolation between
// the running mean of the base sequence and the base sequence itself; the
// mean update weights every base iterate equally, so no decaying learning
// rate schedule is needed (an optional linear warmup scales the constant lr).
struct ScheduleFreeState {
  ParamVector avg;   // running mean of the base sequence, returned to the caller
  ParamVector base_point;
  double interp = 0.0;  // [0, 1); weight of avg in the gradient point
  double lr = 0.0;      // constant after warmup
  std::int64_t warmup_steps = 0;
  double weight_decay = 0.0;
  ClipSpec clip;
  std::int64_t step = 1;  // 1-based
  std::unique_ptr<BaseOptimizer> base;

  ScheduleFreeState(ParamVector x0, double interp, double lr,
                    std::unique_ptr<BaseOptimizer> base, double weight_decay = 0.0,
                    ClipSpec clip = ClipSpec::disabled(), std::int64_t warmup_steps = 0);

  int aux_buffer_count() const { return 1 + base->aux_buffer_count(); }
};

void schedule_free_step(ScheduleFreeState& state, const GradOracle& oracle);

}  // namespace gpa
