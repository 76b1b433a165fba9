#include "gpa/problems.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpa {

namespace {

// log(1 + exp(t)) without overflow for large |t|.
double log1p_exp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

ParamVector Problem::exact_gradient(const ParamVector&) const {
  throw std::logic_error(name() + ": exact gradient unavailable");
}

double Problem::bregman(const ParamVector& a, const ParamVector& b) const {
  require_same_dim(a, b, name() + " bregman");
  return loss(a) - loss(b) - exact_gradient(b).dot(a - b);
}

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd a, ParamVector b, double noise_std)
    : a_(std::move(a)), b_(std::move(b)), noise_std_(noise_std) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw std::invalid_argument("quadratic: A must be n x n matching b");
  }
  if (noise_std_ < 0.0) throw std::invalid_argument("quadratic: noise_std must be >= 0");
  const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    throw std::invalid_argument("quadratic: A must be symmetric (asymmetry " +
                                std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("quadratic: A must be positive definite");
  }
  x_star_ = a_.llt().solve(-b_);
}

double QuadraticProblem::loss(const ParamVector& x) const {
  require_same_dim(x, b_, "quadratic loss");
  return 0.5 * x.dot(a_ * x) + b_.dot(x);
}

ParamVector QuadraticProblem::exact_gradient(const ParamVector& x) const {
  require_same_dim(x, b_, "quadratic gradient");
  return a_ * x + b_;
}

ParamVector QuadraticProblem::gradient(const ParamVector& x, RngStream& rng) const {
  ParamVector g = exact_gradient(x);
  if (noise_std_ > 0.0) g += rng.normal_vector(g.size(), noise_std_);
  return g;
}

double QuadraticProblem::bregman(const ParamVector& a, const ParamVector& b) const {
  require_same_dim(a, b, "quadratic bregman");
  require_same_dim(a, b_, "quadratic bregman");
  const ParamVector d = a - b;
  return 0.5 * d.dot(a_ * d);
}

QuadraticProblem QuadraticProblem::random(Eigen::Index dim, RngStream& rng, double eig_min,
                                          double eig_max, double noise_std) {
  if (!(eig_min > 0.0 && eig_max >= eig_min)) {
    throw std::invalid_argument("quadratic: need 0 < eig_min <= eig_max");
  }
  Eigen::MatrixXd gauss(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) gauss(i, j) = rng.normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd eigs(dim);
  for (Eigen::Index i = 0; i < dim; ++i) eigs[i] = eig_min + (eig_max - eig_min) * rng.uniform();
  Eigen::MatrixXd a = q * eigs.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());  // kill rounding asymmetry
  return QuadraticProblem(std::move(a), rng.normal_vector(dim), noise_std);
}

LogisticProblem::LogisticProblem(Eigen::MatrixXd features, Eigen::VectorXd labels, double l2_reg,
                                 Eigen::Index batch_size)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      l2_reg_(l2_reg),
      batch_size_(batch_size) {
  if (features_.rows() == 0) throw std::invalid_argument("logistic: no samples");
  if (features_.rows() != labels_.size()) {
    throw std::invalid_argument("logistic: features/labels row mismatch");
  }
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw std::invalid_argument("logistic: labels must be +-1");
    }
  }
  if (l2_reg_ < 0.0) throw std::invalid_argument("logistic: l2_reg must be >= 0");
  if (batch_size_ < 1 || batch_size_ > features_.rows()) {
    throw std::invalid_argument("logistic: batch_size must be in [1, n_samples]");
  }
}

double LogisticProblem::loss(const ParamVector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("logistic loss: dimension mismatch");
  const Eigen::VectorXd margins = features_ * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    total += log1p_exp(-labels_[i] * margins[i]);
  }
  return total / static_cast<double>(features_.rows()) + 0.5 * l2_reg_ * x.squaredNorm();
}

ParamVector LogisticProblem::exact_gradient(const ParamVector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("logistic gradient: dimension mismatch");
  ParamVector g = ParamVector::Zero(dim());
  const Eigen::VectorXd margins = features_ * x;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double w = -labels_[i] * sigmoid(-labels_[i] * margins[i]);
    g += w * features_.row(i).transpose();
  }
  g /= static_cast<double>(features_.rows());
  g += l2_reg_ * x;
  return g;
}

ParamVector LogisticProblem::gradient(const ParamVector& x, RngStream& rng) const {
  if (batch_size_ == features_.rows()) return exact_gradient(x);
  if (x.size() != dim()) throw std::invalid_argument("logistic gradient: dimension mismatch");
  ParamVector g = ParamVector::Zero(dim());
  for (Eigen::Index k = 0; k < batch_size_; ++k) {
    const auto i = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(features_.rows())));
    const double margin = features_.row(i).dot(x);
    const double w = -labels_[i] * sigmoid(-labels_[i] * margin);
    g += w * features_.row(i).transpose();
  }
  g /= static_cast<double>(batch_size_);
  g += l2_reg_ * x;
  return g;
}

LogisticProblem LogisticProblem::synthetic(Eigen::Index n_samples, Eigen::Index dim,
                                           RngStream& rng, double l2_reg,
                                           Eigen::Index batch_size) {
  ParamVector separator = rng.normal_vector(dim);
  Eigen::MatrixXd features(n_samples, dim);
  Eigen::VectorXd labels(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) features(i, j) = rng.normal();
    labels[i] = features.row(i).dot(separator) >= 0.0 ? 1.0 : -1.0;
  }
  return LogisticProblem(std::move(features), std::move(labels), l2_reg, batch_size);
}

LogisticProblem LogisticProblem::from_csv(const std::string& path, double l2_reg,
                                          Eigen::Index batch_size) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("logistic: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("logistic: empty file " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("logistic: ragged CSV row in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().size() < 2) {
    throw std::runtime_error("logistic: CSV needs >= 1 feature column and a label column");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size()) - 1;
  Eigen::MatrixXd features(n, d);
  Eigen::VectorXd labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) features(i, j) = rows[i][static_cast<std::size_t>(j)];
    labels[i] = rows[i][static_cast<std::size_t>(d)];
  }
  return LogisticProblem(std::move(features), std::move(labels), l2_reg, batch_size);
}

RobustMedianProblem::RobustMedianProblem(std::vector<double> targets)
    : targets_(std::move(targets)) {
  if (targets_.empty()) throw std::invalid_argument("robust_median: targets must be nonempty");
}

double RobustMedianProblem::loss(const ParamVector& x) const {
  if (x.size() != 1) throw std::invalid_argument("robust_median: dim 1 expected");
  double total = 0.0;
  for (double t : targets_) total += std::abs(x[0] - t);
  return total / static_cast<double>(targets_.size());
}

double RobustMedianProblem::subgradient(double x, RngStream& rng) const {
  const double target = targets_[rng.uniform_index(targets_.size())];
  if (x > target) return 1.0;
  if (x < target) return -1.0;
  return 0.0;  // minimal-norm element of [-1, 1] at the kink
}

ParamVector RobustMedianProblem::gradient(const ParamVector& x, RngStream& rng) const {
  if (x.size() != 1) throw std::invalid_argument("robust_median: dim 1 expected");
  ParamVector g(1);
  g[0] = subgradient(x[0], rng);
  return g;
}

double RobustMedianProblem::median() const {
  std::vector<double> sorted = targets_;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::optional<ParamVector> RobustMedianProblem::optimum() const {
  ParamVector x(1);
  x[0] = median();
  return x;
}

ParamVector finite_difference_gradient(const Problem& problem, const ParamVector& x,
                                       double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
  ParamVector g(x.size());
  ParamVector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = problem.loss(probe);
    probe[i] = x[i] - step;
    const double down = problem.loss(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

}  // namespace gpa
