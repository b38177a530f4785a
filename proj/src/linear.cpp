#include "fidget/linear.hpp"

#include "fidget/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fidget {

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean();
  s.scale.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = n > 0 ? (x.col(c).array() - s.mean(c)).square().sum() / n : 0.0;
    const double sd = std::sqrt(var);
    s.scale(c) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::fit_shared(const Eigen::MatrixXd& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean();
  double total = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    total += n > 0 ? (x.col(c).array() - s.mean(c)).square().sum() / n : 0.0;
  const double rms = x.cols() > 0 ? std::sqrt(total / static_cast<double>(x.cols())) : 0.0;
  s.scale = Eigen::RowVectorXd::Constant(x.cols(), rms > 1e-12 ? rms : 1.0);
  return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) throw ModelError("standardizer: column count mismatch");
  return (x.rowwise() - mean).array().rowwise() / scale.array();
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void LogisticRegression::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& targets, int max_iter) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n == 0 || targets.size() != n) throw DataError("logistic regression: bad training shape");
  // Augmented design with the intercept in the last column.
  Eigen::MatrixXd a(n, p + 1);
  a.leftCols(p) = x;
  a.col(p).setOnes();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p + 1, l2_);
  penalty(p) = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd z = a * theta;
    Eigen::VectorXd prob(n), wts(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob(i) = sigmoid(z(i));
      wts(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-10);
    }
    const Eigen::VectorXd grad = a.transpose() * (prob - targets) + penalty.cwiseProduct(theta);
    Eigen::MatrixXd hess = a.transpose() * wts.asDiagonal() * a;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-9;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    theta -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  w_ = theta.head(p);
  b_ = theta(p);
}

double LogisticRegression::predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  if (row.size() != w_.size()) throw ModelError("logistic regression: feature count mismatch");
  return sigmoid(row.dot(w_) + b_);
}

bool cholesky_solve(double* a, double* b, int n, double rel_tol) {
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, a[i * n + i]);
  const double tol = rel_tol * max_diag;
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > tol)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return true;
}

LeastSquaresFit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge_lambda) {
  if (x.rows() != y.size() || x.rows() == 0) throw DataError("least squares: bad training shape");
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const double ybar = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - mu;
  const Eigen::VectorXd yc = y.array() - ybar;
  const auto p = static_cast<int>(x.cols());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor gram = xc.transpose() * xc;
  const Eigen::VectorXd rhs = xc.transpose() * yc;
  LeastSquaresFit fit;
  RowMajor a = gram;
  fit.coefficients = rhs;
  if (!cholesky_solve(a.data(), fit.coefficients.data(), p)) {
    a = gram;
    a.diagonal().array() += ridge_lambda;
    fit.coefficients = rhs;
    if (!cholesky_solve(a.data(), fit.coefficients.data(), p, 0.0))
      throw DataError("least squares: ridge system is not positive definite");
    fit.ridge = true;
  }
  fit.intercept = ybar - mu.dot(fit.coefficients);
  return fit;
}

}  // namespace fidget
