#include "gpa/diagnostics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gpa {

BoundLedger::BoundLedger(const Problem& problem, ParamVector x_star, double mu_x, double mu_y)
    : problem_(problem), x_star_(std::move(x_star)), mu_x_(mu_x), mu_y_(mu_y) {
  if (x_star_.size() != problem.dim()) {
    throw std::invalid_argument("bound ledger: optimum dimension mismatch");
  }
  if (!(mu_x_ >= 0.0 && mu_x_ <= 1.0) || !(mu_y_ >= 0.0 && mu_y_ <= 1.0)) {
    throw std::domain_error("bound ledger: mu_x, mu_y must be in [0, 1]");
  }
  f_star_ = problem_.loss(x_star_);
  eval_mean_ = ParamVector::Zero(problem.dim());
}

void BoundLedger::accumulate(const BoundSnapshot& snapshot) {
  const ParamVector grad_train = problem_.exact_gradient(snapshot.train);
  regret_sum_ += grad_train.dot(snapshot.base - x_star_);
  bregman_train_eval_ += problem_.bregman(snapshot.train, snapshot.eval);
  bregman_eval_train_ += problem_.bregman(snapshot.eval, snapshot.train);
  bregman_consecutive_ += problem_.bregman(snapshot.eval_prev, snapshot.eval);
  if (steps_ == 0) initial_gap_ = problem_.loss(snapshot.eval) - f_star_;
  steps_ += 1;
  eval_mean_ += (snapshot.eval - eval_mean_) / static_cast<double>(steps_);
}

BoundLedger::Result BoundLedger::check_bound() const {
  if (steps_ < 1) throw std::logic_error("bound ledger: no steps accumulated");
  if (mu_x_ == 1.0 || mu_y_ == 1.0) {
    throw std::domain_error("bound ledger: coefficients diverge at mu = 1");
  }
  const double cx = mu_x_ / (1.0 - mu_x_);
  const double cy = mu_y_ / (1.0 - mu_y_);
  const double t = static_cast<double>(steps_);
  Result r;
  r.lhs = problem_.loss(eval_mean_) - f_star_;
  r.rhs = (regret_sum_ + cx * initial_gap_ - bregman_train_eval_ / (1.0 - mu_y_) -
           cy * bregman_eval_train_ - cx * bregman_consecutive_) /
          t;
  r.holds = r.lhs <= r.rhs + 1e-9;
  return r;
}

std::string BoundLedger::to_json() const {
  nlohmann::json j;
  j["steps"] = steps_;
  j["regret_sum"] = regret_sum_;
  j["bregman_train_eval"] = bregman_train_eval_;
  j["bregman_eval_train"] = bregman_eval_train_;
  j["bregman_consecutive"] = bregman_consecutive_;
  j["initial_gap"] = initial_gap_;
  j["mu_x"] = mu_x_;
  j["mu_y"] = mu_y_;
  if (steps_ >= 1 && mu_x_ < 1.0 && mu_y_ < 1.0) {
    const Result r = check_bound();
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["holds"] = r.holds;
  }
  return j.dump(2);
}

void RateFit::validate() const {
  if (horizons.size() != gaps.size()) {
    throw std::invalid_argument("rate fit: horizons/gaps length mismatch");
  }
  if (horizons.size() < 4) throw std::invalid_argument("rate fit: need >= 4 horizons");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (i > 0 && !(horizons[i] > horizons[i - 1])) {
      throw std::invalid_argument("rate fit: horizons must be strictly increasing");
    }
    if (!(gaps[i] > 0.0)) throw std::invalid_argument("rate fit: gaps must be positive");
  }
}

double fit_rate(const RateFit& fit) {
  fit.validate();
  const std::size_t n = fit.horizons.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += std::log(fit.horizons[i]);
    mean_y += std::log(fit.gaps[i]);
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(fit.horizons[i]) - mean_x;
    const double dy = std::log(fit.gaps[i]) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  return sxy / sxx;
}

}  // namespace gpa
