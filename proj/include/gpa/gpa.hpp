#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "gpa/base_opt.hpp"
#include "gpa/clip.hpp"
#include "gpa/types.hpp"

namespace gpa {

// Generalized primal averaging: three coupled sequences driven by any base
// optimizer. base_point takes the raw (decayed) base update, eval_point keeps
// an exponential moving average of base_point with retention mu_x, and
// train_point -- where gradients are computed -- interpolates the two with
// weight mu_y. mu_x = 0 collapses everything onto the base optimizer,
// mu_y = 1 gives averaged Polyak momentum, mu_y = 0 decouples eval_point into
// a passive EMA of the base trajectory.
struct GpaState {
  ParamVector eval_point;   // returned to the caller, loss is reported here
  ParamVector train_point;  // gradient computation point
  ParamVector base_point;   // raw base-optimizer sequence
  double mu_x = 0.0;        // [0, 1); eval-sequence retention
  double mu_y = 0.0;        // [0, 1]; train-point interpolation
  double weight_decay = 0.0;
  ClipSpec clip;
  std::int64_t step = 0;
  std::unique_ptr<BaseOptimizer> base;

  GpaState(ParamVector x0, double mu_x, double mu_y, std::unique_ptr<BaseOptimizer> base,
           double weight_decay = 0.0, ClipSpec clip = ClipSpec::disabled());
};

// One step: g = oracle(train_point), d = base(clip(g)),
//   base_point <- (1 - lr*decay) * base_point - lr * d
//   eval_point <- mu_x * eval_point + (1 - mu_x) * base_point
//   train_point <- mu_y * eval_point + (1 - mu_y) * base_point
// The stored train_point always satisfies the interpolation identity, so the
// next step can use it directly.
void gpa_step(GpaState& state, const GradOracle& oracle, double lr);

enum class GpaMode { kTrain, kEval };

// Memory-efficient variant: stores only the train point and the base point,
// reconstructing the eval point on demand. Requires mu_y > 0. In eval mode
// the stored vector is the eval point and gradient steps are rejected.
struct GpaMemState {
  ParamVector point;       // train point in train mode, eval point in eval mode
  ParamVector base_point;  // base-optimizer sequence
  double mu_x = 0.0;       // [0, 1)
  double mu_y = 1.0;       // (0, 1]
  double weight_decay = 0.0;
  ClipSpec clip;
  GpaMode mode = GpaMode::kTrain;
  std::int64_t step = 0;
  std::unique_ptr<BaseOptimizer> base;

  GpaMemState(ParamVector x0, double mu_x, double mu_y, std::unique_ptr<BaseOptimizer> base,
              double weight_decay = 0.0, ClipSpec clip = ClipSpec::disabled());

  ParamVector eval_point() const;
  ParamVector train_point() const;
  void to_eval_mode();
  void to_train_mode();
};

// One step of the two-buffer form. The new train point comes from the
// identity y' = (mu_x*mu_y) x + (1 - mu_x*mu_y) z', with x reconstructed from
// the stored pair before the base update.
void gpa_mem_step(GpaMemState& state, const GradOracle& oracle, double lr);

// Eval point from a (train point, base point) pair: (1/mu_y) y + (1 - 1/mu_y) z.
// Rejects mu_y = 0.
ParamVector to_eval_point(const ParamVector& train_point, const ParamVector& base_point,
                          double mu_y);

// Train point from an (eval point, base point) pair: mu_y x + (1 - mu_y) z.
// Inverse of to_eval_point whenever mu_y > 0.
ParamVector to_train_point(const ParamVector& eval_point, const ParamVector& base_point,
                           double mu_y);

// Converts a lookahead-style recipe (momentum mu, H inner steps) to the
// interpolation constants (mu_x, mu_y) = (mu^(1/H), mu) that smooth the eval
// sequence at a matching rate over H steps.
std::pair<double, double> map_diloco_to_gpa(double mu, std::int64_t inner_steps);

// Closed-form weighted average that the eval sequence equals after |history|
// steps: history[0] is the initial base point, history[s] the base point
// after step s. Relative weights mu_x^(t-s) are accumulated directly so no
// mu_x^(-s) blowup occurs. Independent route for checking the incremental
// eval-point recursion.
ParamVector weighted_average_oracle(const std::vector<ParamVector>& base_history, double mu_x);

}  // namespace gpa
