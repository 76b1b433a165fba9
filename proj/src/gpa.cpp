#include "gpa/gpa.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gpa {

namespace {

void check_mu_x(double mu_x) {
  if (!(mu_x >= 0.0 && mu_x < 1.0)) {
    throw std::domain_error("gpa: mu_x must be in [0, 1)");
  }
}

void check_weight_decay(double wd) {
  if (!(wd >= 0.0)) throw std::invalid_argument("gpa: weight_decay must be >= 0");
}

void check_lr(double lr) {
  // lr = 0 is legal: schedules that decay to a zero floor emit it on the
  // final step, and a zero-lr step still advances the averaging.
  if (!(lr >= 0.0)) throw std::invalid_argument("gpa: lr must be >= 0");
}

}  // namespace

GpaState::GpaState(ParamVector x0, double mu_x_, double mu_y_,
                   std::unique_ptr<BaseOptimizer> base_, double weight_decay_, ClipSpec clip_)
    : eval_point(x0),
      train_point(x0),
      base_point(std::move(x0)),
      mu_x(mu_x_),
      mu_y(mu_y_),
      weight_decay(weight_decay_),
      clip(clip_),
      base(std::move(base_)) {
  check_mu_x(mu_x);
  if (!(mu_y >= 0.0 && mu_y <= 1.0)) throw std::domain_error("gpa: mu_y must be in [0, 1]");
  check_weight_decay(weight_decay);
  clip.validate();
  if (!base) throw std::invalid_argument("gpa: base optimizer required");
  require_finite(eval_point, "gpa init");
}

void gpa_step(GpaState& state, const GradOracle& oracle, double lr) {
  check_lr(lr);
  state.step += 1;
  const ParamVector g = oracle(state.train_point);
  if (!g.allFinite()) {
    throw std::runtime_error("gpa: non-finite gradient at step " + std::to_string(state.step));
  }
  const ParamVector d = state.base->direction(clip_gradient(g, state.clip));
  state.base_point = (1.0 - lr * state.weight_decay) * state.base_point - lr * d;
  state.eval_point = blend(state.mu_x, state.eval_point, state.base_point);
  state.train_point = blend(state.mu_y, state.eval_point, state.base_point);
  if (!state.base_point.allFinite() || !state.eval_point.allFinite()) {
    throw std::runtime_error("gpa: non-finite iterate at step " + std::to_string(state.step));
  }
}

GpaMemState::GpaMemState(ParamVector x0, double mu_x_, double mu_y_,
                         std::unique_ptr<BaseOptimizer> base_, double weight_decay_,
                         ClipSpec clip_)
    : point(x0),
      base_point(std::move(x0)),
      mu_x(mu_x_),
      mu_y(mu_y_),
      weight_decay(weight_decay_),
      clip(clip_),
      base(std::move(base_)) {
  check_mu_x(mu_x);
  if (!(mu_y > 0.0 && mu_y <= 1.0)) {
    throw std::domain_error("gpa_mem: mu_y must be in (0, 1]");
  }
  check_weight_decay(weight_decay);
  clip.validate();
  if (!base) throw std::invalid_argument("gpa_mem: base optimizer required");
  require_finite(point, "gpa_mem init");
}

ParamVector GpaMemState::eval_point() const {
  if (mode == GpaMode::kEval) return point;
  return to_eval_point(point, base_point, mu_y);
}

ParamVector GpaMemState::train_point() const {
  if (mode == GpaMode::kTrain) return point;
  return to_train_point(point, base_point, mu_y);
}

void GpaMemState::to_eval_mode() {
  if (mode == GpaMode::kEval) return;
  point = to_eval_point(point, base_point, mu_y);
  mode = GpaMode::kEval;
}

void GpaMemState::to_train_mode() {
  if (mode == GpaMode::kTrain) return;
  point = to_train_point(point, base_point, mu_y);
  mode = GpaMode::kTrain;
}

void gpa_mem_step(GpaMemState& state, const GradOracle& oracle, double lr) {
  check_lr(lr);
  if (state.mode == GpaMode::kEval) {
    throw std::logic_error("gpa_mem: gradient step requested in eval mode");
  }
  state.step += 1;
  // Reconstruct the eval point from the pre-update pair; the train-point
  // update below needs it.
  const ParamVector eval_now = to_eval_point(state.point, state.base_point, state.mu_y);
  const ParamVector g = oracle(state.point);
  if (!g.allFinite()) {
    throw std::runtime_error("gpa_mem: non-finite gradient at step " + std::to_string(state.step));
  }
  const ParamVector d = state.base->direction(clip_gradient(g, state.clip));
  state.base_point = (1.0 - lr * state.weight_decay) * state.base_point - lr * d;
  state.point = blend(state.mu_x * state.mu_y, eval_now, state.base_point);
  if (!state.base_point.allFinite() || !state.point.allFinite()) {
    throw std::runtime_error("gpa_mem: non-finite iterate at step " + std::to_string(state.step));
  }
}

ParamVector to_eval_point(const ParamVector& train_point, const ParamVector& base_point,
                          double mu_y) {
  if (!(mu_y > 0.0 && mu_y <= 1.0)) {
    throw std::domain_error("to_eval_point: mu_y must be in (0, 1]");
  }
  require_same_dim(train_point, base_point, "to_eval_point");
  if (mu_y == 1.0) return train_point;
  return base_point + (train_point - base_point) / mu_y;
}

ParamVector to_train_point(const ParamVector& eval_point, const ParamVector& base_point,
                           double mu_y) {
  if (!(mu_y >= 0.0 && mu_y <= 1.0)) {
    throw std::domain_error("to_train_point: mu_y must be in [0, 1]");
  }
  require_same_dim(eval_point, base_point, "to_train_point");
  return blend(mu_y, eval_point, base_point);
}

std::pair<double, double> map_diloco_to_gpa(double mu, std::int64_t inner_steps) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw std::domain_error("map_diloco_to_gpa: mu must be in (0, 1)");
  }
  if (inner_steps < 1) {
    throw std::domain_error("map_diloco_to_gpa: inner_steps must be >= 1");
  }
  return {std::pow(mu, 1.0 / static_cast<double>(inner_steps)), mu};
}

ParamVector weighted_average_oracle(const std::vector<ParamVector>& base_history, double mu_x) {
  if (base_history.empty()) {
    throw std::invalid_argument("weighted_average_oracle: empty history");
  }
  check_mu_x(mu_x);
  const std::size_t t = base_history.size();
  // x_t = mu_x^(t-1) z_1 + (1 - mu_x) sum_{s=2..t} mu_x^(t-s) z_s.
  ParamVector acc =
      std::pow(mu_x, static_cast<double>(t - 1)) * base_history.front();
  for (std::size_t s = 2; s <= t; ++s) {
    const double w = (1.0 - mu_x) * std::pow(mu_x, static_cast<double>(t - s));
    acc += w * base_history[s - 1];
  }
  return acc;
}

}  // namespace gpa
