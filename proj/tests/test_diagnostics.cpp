#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gpa/diagnostics.hpp"
#include "gpa/gpa.hpp"
#include "gpa/problems.hpp"
#include "test_helpers.hpp"

using namespace gpa;
using gpa::testing::vec;

namespace {

QuadraticProblem scalar_quadratic() {
  return QuadraticProblem(Eigen::MatrixXd::Identity(1, 1), ParamVector::Zero(1));
}

}  // namespace

TEST_CASE("bound ledger: hand-computed increments") {
  const auto p = scalar_quadratic();
  BoundLedger ledger(p, vec({0.0}), 0.5, 0.5);
  ledger.accumulate({vec({1.0}), vec({0.95}), vec({1.0}), vec({1.0})});
  CHECK(ledger.regret_sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ledger.bregman_train_eval() == doctest::Approx(0.00125).epsilon(1e-12));
  CHECK(ledger.bregman_eval_train() == doctest::Approx(0.00125).epsilon(1e-12));
  CHECK(ledger.bregman_consecutive() == doctest::Approx(0.00125).epsilon(1e-12));
  CHECK(ledger.steps() == 1);
}

TEST_CASE("bound ledger: all increments vanish at the optimum") {
  const auto p = scalar_quadratic();
  BoundLedger ledger(p, vec({0.0}), 0.9, 0.5);
  for (int t = 0; t < 5; ++t) {
    ledger.accumulate({vec({0.0}), vec({0.0}), vec({0.0}), vec({0.0})});
  }
  CHECK(ledger.regret_sum() == 0.0);
  CHECK(ledger.bregman_train_eval() == 0.0);
  CHECK(ledger.bregman_eval_train() == 0.0);
  CHECK(ledger.bregman_consecutive() == 0.0);
  const auto r = ledger.check_bound();
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK(r.holds);
}

TEST_CASE("bound ledger: bregman terms do not depend on the optimum") {
  Eigen::MatrixXd a = 2.0 * Eigen::MatrixXd::Identity(1, 1);
  ParamVector b(1);
  b[0] = -1.0;  // optimum at 0.5
  const QuadraticProblem p(a, b);
  BoundLedger at_opt(p, *p.optimum(), 0.5, 0.5);
  BoundLedger at_zero(p, vec({0.0}), 0.5, 0.5);  // deliberately not the optimum
  const BoundSnapshot snap{vec({1.0}), vec({0.9}), vec({0.95}), vec({1.1})};
  at_opt.accumulate(snap);
  at_zero.accumulate(snap);
  CHECK(at_opt.bregman_train_eval() == at_zero.bregman_train_eval());
  CHECK(at_opt.bregman_eval_train() == at_zero.bregman_eval_train());
  CHECK(at_opt.bregman_consecutive() == at_zero.bregman_consecutive());
  CHECK(at_opt.regret_sum() != at_zero.regret_sum());
}

TEST_CASE("bound ledger: mu_y = 1 coefficients are rejected, not infinite") {
  const auto p = scalar_quadratic();
  BoundLedger ledger(p, vec({0.0}), 0.5, 1.0);
  ledger.accumulate({vec({1.0}), vec({1.0}), vec({1.0}), vec({1.0})});
  CHECK_THROWS_AS(ledger.check_bound(), std::domain_error);
}

TEST_CASE("bound ledger: empty ledger cannot be checked") {
  const auto p = scalar_quadratic();
  BoundLedger ledger(p, vec({0.0}), 0.5, 0.5);
  CHECK_THROWS_AS(ledger.check_bound(), std::logic_error);
}

TEST_CASE("bound ledger: mu_x = mu_y = 0 leaves only average regret on the rhs") {
  const auto p = scalar_quadratic();
  BoundLedger ledger(p, vec({0.0}), 0.0, 0.0);
  ledger.accumulate({vec({1.0}), vec({1.0}), vec({1.0}), vec({2.0})});
  ledger.accumulate({vec({1.0}), vec({0.5}), vec({0.5}), vec({1.5})});
  // rhs = (regret - sum B(train, eval)) / steps with unit coefficient on the
  // train/eval term; train == eval in these snapshots so that term is zero
  CHECK(ledger.check_bound().rhs ==
        doctest::Approx(ledger.regret_sum() / 2.0).epsilon(1e-14));
}

TEST_CASE("bound ledger: accumulators are monotone over a real run") {
  RngStream rng(3, 0);
  const auto problem = QuadraticProblem::random(6, rng, 0.5, 3.0);
  GpaState state(rng.normal_vector(6), 0.9, 0.5, std::make_unique<SgdOptimizer>());
  const GradOracle oracle = [&](const ParamVector& w) { return problem.exact_gradient(w); };

  BoundLedger ledger(problem, *problem.optimum(), 0.9, 0.5);
  ParamVector eval_prev = state.eval_point;
  double last_yx = 0.0, last_xy = 0.0, last_xx = 0.0;
  for (int t = 0; t < 100; ++t) {
    ledger.accumulate({eval_prev, state.eval_point, state.train_point, state.base_point});
    CHECK(ledger.bregman_train_eval() >= last_yx);
    CHECK(ledger.bregman_eval_train() >= last_xy);
    CHECK(ledger.bregman_consecutive() >= last_xx);
    last_yx = ledger.bregman_train_eval();
    last_xy = ledger.bregman_eval_train();
    last_xx = ledger.bregman_consecutive();
    eval_prev = state.eval_point;
    gpa_step(state, oracle, 0.05);
  }
}

TEST_CASE("bound holds across a deterministic configuration grid") {
  RngStream rng(11, 0);
  const auto problem = QuadraticProblem::random(10, rng, 0.5, 3.0);
  for (double mu_x : {0.5, 0.9}) {
    for (double mu_y : {0.0, 0.5, 0.9}) {
      for (double lr : {0.01, 0.1}) {
        GpaState state(rng.normal_vector(10), mu_x, mu_y, std::make_unique<SgdOptimizer>());
        const GradOracle oracle = [&](const ParamVector& w) { return problem.exact_gradient(w); };
        const BoundLedger ledger =
            instrument_run(problem, state, oracle, lr, 100, mu_x, mu_y,
                           [](GpaState& s, const GradOracle& o, double g) { gpa_step(s, o, g); });
        const auto r = ledger.check_bound();
        CAPTURE(mu_x);
        CAPTURE(mu_y);
        CAPTURE(lr);
        CHECK(r.holds);
        CHECK(r.lhs <= r.rhs + 1e-9);
      }
    }
  }
}

TEST_CASE("bound ledger: json dump carries every term") {
  const auto p = scalar_quadratic();
  BoundLedger ledger(p, vec({0.0}), 0.5, 0.5);
  ledger.accumulate({vec({1.0}), vec({1.0}), vec({1.0}), vec({1.0})});
  const std::string dump = ledger.to_json();
  for (const char* key : {"regret_sum", "bregman_train_eval", "bregman_eval_train",
                          "bregman_consecutive", "initial_gap", "lhs", "rhs", "holds"}) {
    CHECK(dump.find(key) != std::string::npos);
  }
}

TEST_CASE("fit_rate: synthetic power laws recover their exponents") {
  RateFit half;
  RateFit one;
  for (double t : {256.0, 1024.0, 4096.0, 16384.0}) {
    half.horizons.push_back(t);
    half.gaps.push_back(3.7 / std::sqrt(t));
    one.horizons.push_back(t);
    one.gaps.push_back(0.2 / t);
  }
  CHECK(fit_rate(half) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit_rate(one) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("fit_rate: validation") {
  RateFit bad;
  bad.horizons = {1.0, 2.0, 3.0};
  bad.gaps = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(fit_rate(bad), std::invalid_argument);  // too few horizons
  bad.horizons = {1.0, 2.0, 3.0, 3.0};
  bad.gaps = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(fit_rate(bad), std::invalid_argument);  // not increasing
  bad.horizons = {1.0, 2.0, 3.0, 4.0};
  bad.gaps = {1.0, 1.0, -1.0, 1.0};
  CHECK_THROWS_AS(fit_rate(bad), std::invalid_argument);  // nonpositive gap
}
