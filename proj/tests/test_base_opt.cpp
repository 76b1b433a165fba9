#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gpa/base_opt.hpp"
#include "gpa/rng.hpp"
#include "test_helpers.hpp"

using namespace gpa;
using gpa::testing::vec;

TEST_CASE("sgd direction is the gradient") {
  SgdState s;
  CHECK(sgd_direction(vec({1.0, -2.0}), s) == vec({1.0, -2.0}));
  CHECK(sgd_direction(vec({0.0, 0.0}), s) == vec({0.0, 0.0}));
  CHECK(sgd_direction(vec({0.5}), s) == vec({0.5}));
}

TEST_CASE("adamw: first step with eps=0 returns the unit-scaled gradient") {
  AdamWState s(1, 0.9, 0.999, 0.0);
  const ParamVector d = adamw_direction(vec({1.0}), s);
  // bias-corrected m and sqrt(v) both equal the gradient on step one
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.step == 1);
}

TEST_CASE("adamw: zero gradient on a fresh state gives zero direction") {
  AdamWState s(3, 0.9, 0.999, 1e-8);
  const ParamVector d = adamw_direction(ParamVector::Zero(3), s);
  CHECK(d == ParamVector::Zero(3));
}

TEST_CASE("adamw: constant gradient keeps d = g/(|g|+eps) at every step") {
  for (double eps : {0.0, 1e-8, 1e-3}) {
    AdamWState s(2, 0.9, 0.999, eps);
    const ParamVector g = vec({1.0, -0.25});
    for (int t = 0; t < 40; ++t) {
      const ParamVector d = adamw_direction(g, s);
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        CHECK(d[i] == doctest::Approx(g[i] / (std::abs(g[i]) + eps)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("adamw: beta1=beta2=0, eps=0 acts as sign normalization") {
  RngStream rng(11, 3);
  AdamWState s(20, 0.0, 0.0, 0.0);
  for (int t = 0; t < 10; ++t) {
    const ParamVector g = rng.normal_vector(20);
    const ParamVector d = adamw_direction(g, s);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (g[i] != 0.0) CHECK(d[i] == doctest::Approx(g[i] / std::abs(g[i])).epsilon(1e-12));
    }
  }
}

TEST_CASE("adamw: second moment stays nonnegative and step counts up by one") {
  RngStream rng(5, 1);
  AdamWState s(8, 0.9, 0.999, 1e-8);
  for (std::uint64_t t = 1; t <= 25; ++t) {
    adamw_direction(rng.normal_vector(8, 3.0), s);
    CHECK(s.step == t);
    CHECK(s.exp_avg_sq.minCoeff() >= 0.0);
  }
}

TEST_CASE("adamw: deterministic for identical gradient sequences") {
  RngStream rng_a(9, 0);
  RngStream rng_b(9, 0);
  AdamWState a(4, 0.9, 0.999, 1e-8);
  AdamWState b(4, 0.9, 0.999, 1e-8);
  for (int t = 0; t < 30; ++t) {
    const ParamVector da = adamw_direction(rng_a.normal_vector(4), a);
    const ParamVector db = adamw_direction(rng_b.normal_vector(4), b);
    CHECK(da == db);
  }
}

TEST_CASE("adamw: invalid parameters and inputs rejected") {
  CHECK_THROWS_AS(AdamWState(2, 1.0, 0.999, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(AdamWState(2, 0.9, -0.1, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(AdamWState(2, 0.9, 0.999, -1e-8), std::invalid_argument);
  AdamWState s(2, 0.9, 0.999, 1e-8);
  ParamVector bad = vec({1.0, 2.0});
  bad[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(adamw_direction(bad, s), std::invalid_argument);
  CHECK_THROWS_AS(adamw_direction(vec({1.0}), s), std::invalid_argument);  // dim mismatch
}

TEST_CASE("adamw: step overflow guarded") {
  AdamWState s(1, 0.9, 0.999, 1e-8);
  s.step = std::numeric_limits<std::uint64_t>::max();
  CHECK_THROWS_AS(adamw_direction(vec({1.0}), s), std::overflow_error);
}

TEST_CASE("base optimizer clones are independent") {
  AdamWOptimizer opt(2);
  opt.direction(vec({1.0, 1.0}));
  auto copy = opt.clone();
  opt.direction(vec({1.0, 1.0}));
  auto* copy_adamw = dynamic_cast<AdamWOptimizer*>(copy.get());
  REQUIRE(copy_adamw != nullptr);
  CHECK(copy_adamw->state().step == 1);
  CHECK(opt.state().step == 2);
  CHECK(opt.aux_buffer_count() == 2);
  CHECK(SgdOptimizer().aux_buffer_count() == 0);
}
