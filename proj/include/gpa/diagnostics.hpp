#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpa/problems.hpp"
#include "gpa/types.hpp"

namespace gpa {

// Per-step snapshot fed to the bound ledger: the pre-step eval point (and its
// predecessor), the gradient point, and the pre-update base point of the same
// step. Pass eval_prev = eval on the first call; its divergence term carries
// zero weight there.
struct BoundSnapshot {
  ParamVector eval_prev;
  ParamVector eval;
  ParamVector train;
  ParamVector base;
};

// Accumulates the terms of the averaged-iterate convergence bound
//   F(mean of eval points) - F(opt)
//     <= [ regret_sum + mu_x/(1-mu_x) * initial gap
//          - 1/(1-mu_y) * sum B(train, eval) - mu_y/(1-mu_y) * sum B(eval, train)
//          - mu_x/(1-mu_x) * sum B(eval_prev, eval) ] / steps
// where regret_sum collects <grad F(train), base - opt> with the exact
// gradient. Restricted to problems with exact losses so expectations are
// exact; on sampled problems the verdict is only indicative.
class BoundLedger {
 public:
  BoundLedger(const Problem& problem, ParamVector x_star, double mu_x, double mu_y);

  void accumulate(const BoundSnapshot& snapshot);

  struct Result {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
  };
  // Evaluates both sides with tolerance 1e-9 on the comparison. Rejects
  // mu_x = 1 or mu_y = 1 (the coefficients diverge) and an empty ledger.
  Result check_bound() const;

  double regret_sum() const { return regret_sum_; }
  double bregman_train_eval() const { return bregman_train_eval_; }
  double bregman_eval_train() const { return bregman_eval_train_; }
  double bregman_consecutive() const { return bregman_consecutive_; }
  double initial_gap() const { return initial_gap_; }
  std::int64_t steps() const { return steps_; }
  const ParamVector& eval_mean() const { return eval_mean_; }

  std::string to_json() const;  // term magnitudes keyed by name

 private:
  const Problem& problem_;
  ParamVector x_star_;
  double f_star_;
  double mu_x_;
  double mu_y_;
  double regret_sum_ = 0.0;
  double bregman_train_eval_ = 0.0;   // B(train, eval)
  double bregman_eval_train_ = 0.0;   // B(eval, train)
  double bregman_consecutive_ = 0.0;  // B(eval_prev, eval)
  double initial_gap_ = 0.0;          // F(first eval point) - F(opt)
  std::int64_t steps_ = 0;
  ParamVector eval_mean_;
};

// Drives `steps` updates of the supplied optimizer state at a constant
// learning rate, feeding each pre-step snapshot (previous eval point, eval
// point, train point, base point) into a fresh ledger. The problem must have
// a known optimum.
template <typename State, typename StepFn>
BoundLedger instrument_run(const Problem& problem, State& state, const GradOracle& oracle,
                           double lr, std::int64_t steps, double mu_x, double mu_y,
                           StepFn&& step_fn) {
  const auto opt = problem.optimum();
  if (!opt.has_value()) {
    throw std::invalid_argument("instrument_run: problem has no known optimum");
  }
  BoundLedger ledger(problem, *opt, mu_x, mu_y);
  ParamVector eval_prev = state.eval_point;
  for (std::int64_t t = 0; t < steps; ++t) {
    ledger.accumulate({eval_prev, state.eval_point, state.train_point, state.base_point});
    eval_prev = state.eval_point;
    step_fn(state, oracle, lr);
  }
  return ledger;
}

// Gap estimates across increasing horizons and the fitted log-log slope.
struct RateFit {
  std::vector<double> horizons;  // strictly increasing step counts
  std::vector<double> gaps;      // positive averaged-iterate suboptimality

  void validate() const;
};

// Least-squares slope of log(gap) against log(horizon); requires >= 4
// horizons and positive gaps.
double fit_rate(const RateFit& fit);

}  // namespace gpa
