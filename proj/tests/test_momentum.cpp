#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpa/momentum.hpp"
#include "gpa/problems.hpp"
#include "gpa/schedule.hpp"
#include "test_helpers.hpp"

using namespace gpa;
using gpa::testing::SharedNoiseOracle;
using gpa::testing::vec;

namespace {

// g(w) = w, the gradient of the scalar objective w^2/2.
const GradOracle kScalarGrad = [](const ParamVector& w) { return w; };

}  // namespace

TEST_CASE("nesterov modern: one-step hand trace on w^2/2") {
  NesterovModernState s(vec({1.0}), 0.9, 0.1);
  nesterov_modern_step(s, kScalarGrad);
  CHECK(s.buffer[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.iterate[0] == doctest::Approx(0.81).epsilon(1e-15));
}

TEST_CASE("nesterov modern: mu = 0 reduces to sgd") {
  NesterovModernState s(vec({1.0}), 0.0, 0.1);
  nesterov_modern_step(s, kScalarGrad);
  CHECK(s.iterate[0] == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("nesterov modern: zero gradient keeps the iterate fixed") {
  const GradOracle zero = [](const ParamVector& w) { return ParamVector(ParamVector::Zero(w.size())); };
  NesterovModernState s(vec({1.0, -2.0}), 0.9, 0.1);
  for (int t = 0; t < 10; ++t) nesterov_modern_step(s, zero);
  CHECK(s.iterate == vec({1.0, -2.0}));
}

TEST_CASE("nesterov sutskever: one-step hand trace on w^2/2") {
  NesterovSutskeverState s(vec({1.0}), 0.9, 0.1);
  nesterov_sutskever_step(s, kScalarGrad);
  CHECK(s.buffer[0] == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(s.iterate[0] == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("nesterov primal: one-step hand trace on w^2/2") {
  NesterovPrimalState s(vec({1.0}), 0.5, 0.1);
  nesterov_primal_step(s, kScalarGrad);
  CHECK(s.base[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.avg[0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("nesterov primal: mu = 0 walks the plain sgd path") {
  NesterovPrimalState s(vec({1.0}), 0.0, 0.1);
  double w = 1.0;
  for (int t = 0; t < 20; ++t) {
    nesterov_primal_step(s, kScalarGrad);
    w -= 0.1 * w;
    CHECK(s.avg[0] == doctest::Approx(w).epsilon(1e-15));
    CHECK(s.base[0] == s.avg[0]);
  }
}

TEST_CASE("polyak primal: one-step hand trace on w^2/2") {
  PolyakPrimalState s(vec({1.0}), 0.5, 0.1);
  polyak_primal_step(s, kScalarGrad);
  CHECK(s.base[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.avg[0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("polyak primal: mu = 0 reduces to sgd") {
  PolyakPrimalState s(vec({1.0}), 0.0, 0.1);
  double w = 1.0;
  for (int t = 0; t < 10; ++t) {
    polyak_primal_step(s, kScalarGrad);
    w -= 0.1 * w;
    CHECK(s.avg[0] == doctest::Approx(w).epsilon(1e-15));
  }
}

TEST_CASE("polyak modern: one-step hand trace and mu = 0 reduction") {
  PolyakModernState s(vec({1.0}), 0.9, 0.1);
  polyak_modern_step(s, kScalarGrad);
  CHECK(s.iterate[0] == doctest::Approx(0.9).epsilon(1e-15));
  PolyakModernState plain(vec({1.0}), 0.0, 0.1);
  polyak_modern_step(plain, kScalarGrad);
  CHECK(plain.iterate[0] == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("polyak modern satisfies the heavy-ball recurrence") {
  RngStream rng(3, 0);
  const auto problem = QuadraticProblem::random(6, rng, 0.5, 2.0);
  const GradOracle oracle = [&](const ParamVector& w) { return problem.exact_gradient(w); };
  const double mu = 0.8, lr = 0.05;
  PolyakModernState s(rng.normal_vector(6), mu, lr);
  std::vector<ParamVector> xs{s.iterate};
  std::vector<ParamVector> grads;
  for (int t = 0; t < 20; ++t) {
    grads.push_back(problem.exact_gradient(s.iterate));
    polyak_modern_step(s, oracle);
    xs.push_back(s.iterate);
  }
  // x_{t+1} = x_t - lr * g(x_t) + mu (x_t - x_{t-1}) for t >= 2 (1-based)
  for (std::size_t t = 2; t + 1 < xs.size(); ++t) {
    const ParamVector expect = xs[t] - lr * grads[t] + mu * (xs[t] - xs[t - 1]);
    CHECK((xs[t + 1] - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("map_primal_to_modern values") {
  const auto [mu, lr] = map_primal_to_modern(0.9, 1.0);
  CHECK(mu == 0.9);
  CHECK(lr == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(map_primal_to_modern(0.0, 0.5).second == doctest::Approx(0.5));
  CHECK(map_primal_to_modern(0.5, 0.2).second == doctest::Approx(0.1));
  CHECK_THROWS_AS(map_primal_to_modern(1.0, 0.1), std::domain_error);
}

TEST_CASE("recover_modern_buffer: hand value, zero case, linearity") {
  CHECK(recover_modern_buffer(vec({1.0}), vec({0.95}), 0.5, 0.1)[0] ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(recover_modern_buffer(vec({2.0, 3.0}), vec({2.0, 3.0}), 0.5, 0.1) == vec({0.0, 0.0}));
  const ParamVector once = recover_modern_buffer(vec({1.0, -1.0}), vec({0.5, 0.25}), 0.3, 0.2);
  const ParamVector scaled = recover_modern_buffer(vec({3.0, -3.0}), vec({1.5, 0.75}), 0.3, 0.2);
  CHECK((scaled - 3.0 * once).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("recover_modern_buffer matches one actual modern step") {
  // primal run with mu=0.5, lr=0.1 from w=1 gives x: 1 -> 0.95; the buffer of
  // the modern run at lr=(1-mu)*0.1=0.05 after its first step is g(1)=1.
  NesterovModernState modern(vec({1.0}), 0.5, 0.05);
  nesterov_modern_step(modern, kScalarGrad);
  const ParamVector recovered = recover_modern_buffer(vec({1.0}), vec({0.95}), 0.5, 0.1);
  CHECK((recovered - modern.buffer).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("primal/modern equivalence with shared noise over 1000 steps") {
  RngStream setup(2025, 0);
  const auto problem = QuadraticProblem::random(20, setup, 0.5, 3.0);
  const SharedNoiseOracle noise(problem, 99, 1000, 0.05);
  const ParamVector x0 = setup.normal_vector(20);
  const double mu = 0.9, lr_primal = 0.3;
  const auto [mu_m, lr_m] = map_primal_to_modern(mu, lr_primal);

  NesterovPrimalState primal(x0, mu, lr_primal);
  NesterovModernState modern(x0, mu_m, lr_m);
  const GradOracle oracle_p = noise.for_run();
  const GradOracle oracle_m = noise.for_run();

  double max_gap = 0.0, max_buffer_gap = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const ParamVector probe = blend(mu, primal.avg, primal.base);  // gradient point this step
    max_gap = std::max(max_gap, (probe - modern.iterate).cwiseAbs().maxCoeff());
    const ParamVector x_before = primal.avg;
    nesterov_primal_step(primal, oracle_p);
    nesterov_modern_step(modern, oracle_m);
    const ParamVector recovered = recover_modern_buffer(x_before, primal.avg, mu, lr_primal);
    max_buffer_gap = std::max(max_buffer_gap, (recovered - modern.buffer).cwiseAbs().maxCoeff());
  }
  CHECK(max_gap <= 1e-9);
  CHECK(max_buffer_gap <= 1e-9);
}

TEST_CASE("sutskever and modern query gradients at identical points") {
  RngStream setup(7, 0);
  const auto problem = QuadraticProblem::random(10, setup, 0.5, 2.0);
  const SharedNoiseOracle noise(problem, 13, 1000, 0.02);
  const ParamVector x0 = setup.normal_vector(10);

  std::vector<ParamVector> points_s, points_m;
  const GradOracle base_s = noise.for_run();
  const GradOracle base_m = noise.for_run();
  const GradOracle rec_s = [&](const ParamVector& p) {
    points_s.push_back(p);
    return base_s(p);
  };
  const GradOracle rec_m = [&](const ParamVector& p) {
    points_m.push_back(p);
    return base_m(p);
  };
  NesterovSutskeverState sut(x0, 0.9, 0.05);
  NesterovModernState mod(x0, 0.9, 0.05);
  for (int t = 0; t < 1000; ++t) {
    nesterov_sutskever_step(sut, rec_s);
    nesterov_modern_step(mod, rec_m);
  }
  double max_gap = 0.0;
  for (std::size_t t = 0; t < points_s.size(); ++t) {
    max_gap = std::max(max_gap, (points_s[t] - points_m[t]).cwiseAbs().maxCoeff());
  }
  CHECK(max_gap <= 1e-12);
}

TEST_CASE("primal and modern diverge under a time-varying schedule") {
  RngStream setup(41, 0);
  const auto problem = QuadraticProblem::random(10, setup, 0.5, 3.0);
  const ParamVector x0 = setup.normal_vector(10);
  const GradOracle oracle = [&](const ParamVector& p) { return problem.exact_gradient(p); };

  ScheduleSpec sched;
  sched.total_steps = 1000;
  sched.peak_lr = 0.3;
  sched.warmup_fraction = 0.1;
  sched.min_fraction = 0.0;
  sched.shape = ScheduleShape::kCosine;

  const double mu = 0.9;
  NesterovPrimalState primal(x0, mu, 1.0);
  NesterovModernState modern(x0, mu, 1.0);
  double max_gap = 0.0;
  for (std::int64_t t = 1; t <= sched.total_steps; ++t) {
    const double lr = schedule_value(sched, t);
    const ParamVector probe = blend(mu, primal.avg, primal.base);
    max_gap = std::max(max_gap, (probe - modern.iterate).cwiseAbs().maxCoeff());
    primal.lr = lr;
    modern.lr = (1.0 - mu) * lr;
    nesterov_primal_step(primal, oracle);
    nesterov_modern_step(modern, oracle);
  }
  CHECK(max_gap > 1e-3);  // the constant-lr equivalence deliberately breaks
}

TEST_CASE("momentum states validate parameters and flag bad gradients") {
  CHECK_THROWS_AS(NesterovModernState(vec({1.0}), 1.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(NesterovPrimalState(vec({1.0}), 0.5, 0.0), std::invalid_argument);
  const GradOracle nan_oracle = [](const ParamVector& w) {
    ParamVector g = w;
    g[0] = std::numeric_limits<double>::quiet_NaN();
    return g;
  };
  NesterovModernState s(vec({1.0}), 0.9, 0.1);
  try {
    nesterov_modern_step(s, nan_oracle);
    FAIL("expected throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}
