#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpa/rng.hpp"
#include "gpa/types.hpp"

namespace gpa {

// Desk-scale objective with an exact loss, an exact gradient where one
// exists, and a stochastic oracle. Problems are immutable after construction
// and safe to share across concurrent runs; rng streams are per-run.
class Problem {
 public:
  virtual ~Problem() = default;
  virtual Eigen::Index dim() const = 0;
  virtual std::string name() const = 0;
  virtual double loss(const ParamVector& x) const = 0;
  virtual ParamVector gradient(const ParamVector& x, RngStream& rng) const = 0;
  // Exact (noise-free, full-data) gradient. Throws for problems without one.
  virtual ParamVector exact_gradient(const ParamVector& x) const;
  virtual std::optional<ParamVector> optimum() const { return std::nullopt; }
  // Bregman divergence of the exact loss: F(a) - F(b) - <grad F(b), a - b>.
  virtual double bregman(const ParamVector& a, const ParamVector& b) const;
};

// F(x) = 1/2 x'Ax + b'x with A symmetric positive definite; the stochastic
// oracle adds isotropic Gaussian noise of the given standard deviation.
class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(Eigen::MatrixXd a, ParamVector b, double noise_std = 0.0);

  Eigen::Index dim() const override { return b_.size(); }
  std::string name() const override { return "quadratic"; }
  double loss(const ParamVector& x) const override;
  ParamVector gradient(const ParamVector& x, RngStream& rng) const override;
  ParamVector exact_gradient(const ParamVector& x) const override;
  std::optional<ParamVector> optimum() const override { return x_star_; }
  // Closed form for quadratics: 1/2 (a-b)'A(a-b).
  double bregman(const ParamVector& a, const ParamVector& b) const override;

  const Eigen::MatrixXd& matrix() const { return a_; }
  double noise_std() const { return noise_std_; }

  // Random SPD instance with eigenvalues sampled uniformly in [eig_min, eig_max].
  static QuadraticProblem random(Eigen::Index dim, RngStream& rng, double eig_min,
                                 double eig_max, double noise_std = 0.0);

 private:
  Eigen::MatrixXd a_;
  ParamVector b_;
  double noise_std_;
  ParamVector x_star_;
};

// Mean logistic loss over +-1 labelled rows plus an explicit l2 penalty:
// F(x) = mean_i log(1 + exp(-y_i <f_i, x>)) + l2_reg/2 ||x||^2.
// Minibatches are drawn with replacement; batch_size == n_samples means a
// deterministic full pass.
class LogisticProblem final : public Problem {
 public:
  LogisticProblem(Eigen::MatrixXd features, Eigen::VectorXd labels, double l2_reg,
                  Eigen::Index batch_size);

  Eigen::Index dim() const override { return features_.cols(); }
  std::string name() const override { return "logistic"; }
  double loss(const ParamVector& x) const override;
  ParamVector gradient(const ParamVector& x, RngStream& rng) const override;
  ParamVector exact_gradient(const ParamVector& x) const override;

  Eigen::Index n_samples() const { return features_.rows(); }
  Eigen::Index batch_size() const { return batch_size_; }
  double l2_reg() const { return l2_reg_; }

  // Seeded synthetic instance: Gaussian features labelled by a planted
  // separator drawn from the same stream.
  static LogisticProblem synthetic(Eigen::Index n_samples, Eigen::Index dim, RngStream& rng,
                                   double l2_reg, Eigen::Index batch_size);

  // Headered CSV, one row per sample, last column is the +-1 label.
  static LogisticProblem from_csv(const std::string& path, double l2_reg,
                                  Eigen::Index batch_size);

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  double l2_reg_;
  Eigen::Index batch_size_;
};

// One-dimensional non-smooth objective F(x) = mean_i |x - target_i| with a
// subgradient oracle that samples one target per query.
class RobustMedianProblem final : public Problem {
 public:
  explicit RobustMedianProblem(std::vector<double> targets);

  Eigen::Index dim() const override { return 1; }
  std::string name() const override { return "robust_median"; }
  double loss(const ParamVector& x) const override;
  ParamVector gradient(const ParamVector& x, RngStream& rng) const override;
  std::optional<ParamVector> optimum() const override;

  double subgradient(double x, RngStream& rng) const;
  double median() const;
  const std::vector<double>& targets() const { return targets_; }

 private:
  std::vector<double> targets_;
};

// Central finite-difference gradient of the exact loss; the independent check
// for every analytic gradient in the library.
ParamVector finite_difference_gradient(const Problem& problem, const ParamVector& x,
                                       double step = 1e-5);

}  // namespace gpa
