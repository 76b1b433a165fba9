#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gpa/problems.hpp"
#include "test_helpers.hpp"

using namespace gpa;
using gpa::testing::vec;

namespace {

QuadraticProblem identity_quadratic(Eigen::Index dim, double noise = 0.0) {
  return QuadraticProblem(Eigen::MatrixXd::Identity(dim, dim), ParamVector::Zero(dim), noise);
}

}  // namespace

TEST_CASE("quadratic: identity gradient is the point itself") {
  RngStream rng(1, 0);
  const auto p = identity_quadratic(2);
  CHECK(p.gradient(vec({1.0, 2.0}), rng) == vec({1.0, 2.0}));
}

TEST_CASE("quadratic: gradient vanishes at the optimum") {
  RngStream rng(1, 0);
  const auto p = QuadraticProblem::random(10, rng, 0.5, 3.0);
  const ParamVector x_star = *p.optimum();
  CHECK(p.exact_gradient(x_star).norm() <= 1e-10);
}

TEST_CASE("quadratic: diagonal matrix by hand") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 4.0;
  const QuadraticProblem p(a, ParamVector::Zero(2));
  RngStream rng(0, 0);
  CHECK(p.gradient(vec({1.0, 1.0}), rng) == vec({1.0, 4.0}));
}

TEST_CASE("quadratic: noisy gradient is deterministic per stream") {
  const auto p = identity_quadratic(4, 0.3);
  RngStream a(3, 5);
  RngStream b(3, 5);
  CHECK(p.gradient(vec({1.0, 2.0, 3.0, 4.0}), a) == p.gradient(vec({1.0, 2.0, 3.0, 4.0}), b));
}

TEST_CASE("quadratic: construction rejects asymmetric or indefinite matrices") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(QuadraticProblem(bad, ParamVector::Zero(2)), std::invalid_argument);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(QuadraticProblem(indef, ParamVector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(identity_quadratic(2).loss(vec({1.0})), std::invalid_argument);
}

TEST_CASE("bregman: hand values and nonnegativity") {
  const auto p = identity_quadratic(2);
  CHECK(p.bregman(vec({1.0, 0.0}), vec({0.0, 0.0})) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.bregman(vec({1.0, 1.0}), vec({1.0, 1.0})) == 0.0);

  const QuadraticProblem p2(2.0 * Eigen::MatrixXd::Identity(2, 2), ParamVector::Zero(2));
  CHECK(p2.bregman(vec({1.0, 1.0}), vec({0.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-14));

  RngStream rng(17, 2);
  const auto q = QuadraticProblem::random(8, rng, 0.2, 4.0);
  for (int i = 0; i < 30; ++i) {
    CHECK(q.bregman(rng.normal_vector(8, 2.0), rng.normal_vector(8, 2.0)) >= 0.0);
  }
}

TEST_CASE("bregman: closed form matches the generic definition route") {
  RngStream rng(23, 1);
  const auto q = QuadraticProblem::random(6, rng, 0.5, 2.0);
  for (int i = 0; i < 10; ++i) {
    const ParamVector a = rng.normal_vector(6);
    const ParamVector b = rng.normal_vector(6);
    const double generic = q.loss(a) - q.loss(b) - q.exact_gradient(b).dot(a - b);
    CHECK(q.bregman(a, b) == doctest::Approx(generic).epsilon(1e-10));
  }
}

TEST_CASE("logistic: symmetric balanced data has zero full-batch gradient at the origin") {
  Eigen::MatrixXd f(4, 2);
  f << 1.0, 2.0, -1.0, -2.0, -1.0, -2.0, 1.0, 2.0;
  Eigen::VectorXd labels(4);
  labels << 1.0, 1.0, -1.0, -1.0;
  const LogisticProblem p(f, labels, 0.0, 4);
  CHECK(p.exact_gradient(ParamVector::Zero(2)).norm() == 0.0);
}

TEST_CASE("logistic: single-sample gradient at zero is -feature/2") {
  Eigen::MatrixXd f(1, 1);
  f << 1.0;
  Eigen::VectorXd labels(1);
  labels << 1.0;
  const LogisticProblem p(f, labels, 0.0, 1);
  RngStream rng(0, 0);
  CHECK(p.gradient(vec({0.0}), rng)[0] == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("logistic: l2 term contributes reg * x") {
  Eigen::MatrixXd f(1, 1);
  f << 0.0;
  Eigen::VectorXd labels(1);
  labels << 1.0;
  const LogisticProblem p(f, labels, 0.1, 1);
  RngStream rng(0, 0);
  CHECK(p.gradient(vec({2.0}), rng)[0] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("logistic: labels and batch size validated") {
  Eigen::MatrixXd f(2, 1);
  f << 1.0, -1.0;
  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(LogisticProblem(f, bad, 0.0, 1), std::invalid_argument);
  Eigen::VectorXd ok(2);
  ok << 1.0, -1.0;
  CHECK_THROWS_AS(LogisticProblem(f, ok, 0.0, 3), std::invalid_argument);
}

TEST_CASE("logistic: minibatch gradients are unbiased-ish and deterministic") {
  RngStream gen(31, 0);
  const auto p = LogisticProblem::synthetic(64, 5, gen, 0.01, 8);
  const ParamVector x = gen.normal_vector(5);
  RngStream a(4, 4);
  RngStream b(4, 4);
  CHECK(p.gradient(x, a) == p.gradient(x, b));
  // average many minibatch gradients toward the full gradient
  RngStream c(4, 5);
  ParamVector mean = ParamVector::Zero(5);
  const int reps = 4000;
  for (int i = 0; i < reps; ++i) mean += p.gradient(x, c);
  mean /= reps;
  CHECK((mean - p.exact_gradient(x)).norm() < 0.05);
}

TEST_CASE("finite differences confirm quadratic and logistic gradients") {
  RngStream rng(101, 0);
  const auto quad = QuadraticProblem::random(7, rng, 0.3, 5.0);
  RngStream gen(55, 0);
  const auto logi = LogisticProblem::synthetic(40, 7, gen, 0.05, 40);
  for (const Problem* p : {static_cast<const Problem*>(&quad), static_cast<const Problem*>(&logi)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const ParamVector x = rng.normal_vector(7, 2.0);
      const ParamVector fd = finite_difference_gradient(*p, x);
      const ParamVector exact = p->exact_gradient(x);
      CHECK((fd - exact).norm() <= 1e-6 * std::max(1.0, exact.norm()));
    }
  }
}

TEST_CASE("robust median: subgradient signs and tie-break") {
  const RobustMedianProblem p({3.0});
  RngStream rng(0, 0);
  CHECK(p.subgradient(5.0, rng) == 1.0);
  CHECK(p.subgradient(3.0, rng) == 0.0);
  const RobustMedianProblem p2({2.0});
  CHECK(p2.subgradient(0.0, rng) == -1.0);
}

TEST_CASE("robust median: loss and optimum") {
  const RobustMedianProblem p({-1.0, 0.0, 4.0});
  CHECK(p.median() == 0.0);
  CHECK(p.loss(vec({0.0})) == doctest::Approx(5.0 / 3.0));
  const ParamVector x_star = *p.optimum();
  // the median minimizes: probe nearby points
  CHECK(p.loss(x_star) <= p.loss(vec({0.3})));
  CHECK(p.loss(x_star) <= p.loss(vec({-0.3})));
  CHECK_THROWS_AS(RobustMedianProblem({}), std::invalid_argument);
}

TEST_CASE("logistic: CSV import round-trips a small dataset") {
  const std::string path = "test_logistic_import.csv";
  {
    std::ofstream out(path);
    out << "f0,f1,label\n";
    out << "1.5,-2.0,1\n";
    out << "-0.5,0.25,-1\n";
    out << "2.0,1.0,1\n";
  }
  const auto p = LogisticProblem::from_csv(path, 0.01, 2);
  CHECK(p.n_samples() == 3);
  CHECK(p.dim() == 2);
  CHECK(p.batch_size() == 2);
  // loss at zero is log(2) regardless of the data, plus no reg at 0
  CHECK(p.loss(ParamVector::Zero(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  std::remove(path.c_str());
}
