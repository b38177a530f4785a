#pragma once

#include <Eigen/Dense>

#include <vector>

namespace fidget {

// Per-column z-scoring fitted on training rows. Columns with (near) zero
// spread are centred but not scaled.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& x);
  // Centres each column and divides every column by one common scale, the
  // root mean column variance, so relative column magnitudes survive.
  static Standardizer fit_shared(const Eigen::MatrixXd& x);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

// L2-regularized logistic regression fitted by Newton iterations. Targets may
// be soft (in [0, 1]). The intercept is not penalized.
class LogisticRegression {
 public:
  explicit LogisticRegression(double l2 = 1.0) : l2_(l2) {}

  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& targets, int max_iter = 100);
  double predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  // Class 1 iff probability >= 0.5.
  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const { return predict_proba(row) >= 0.5 ? 1 : 0; }

  const Eigen::VectorXd& weights() const { return w_; }
  double bias() const { return b_; }
  void set_parameters(Eigen::VectorXd w, double b) {
    w_ = std::move(w);
    b_ = b;
  }

 private:
  double l2_;
  Eigen::VectorXd w_;
  double b_ = 0.0;
};

// Cholesky solve of the n x n symmetric system a x = b (row-major, both
// overwritten; b receives x). Returns false when a pivot falls to or below
// rel_tol times the largest diagonal entry, i.e. the system is numerically
// rank deficient.
bool cholesky_solve(double* a, double* b, int n, double rel_tol = 1e-10);

struct LeastSquaresFit {
  Eigen::VectorXd coefficients;  // per feature
  double intercept = 0.0;
  bool ridge = false;            // true when the ridge fallback was used
};

// Ordinary least squares with intercept via the centred normal equations;
// falls back to ridge(lambda) when they are rank deficient.
LeastSquaresFit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge_lambda = 1e-6);

}  // namespace fidget
