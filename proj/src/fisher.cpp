#include "fidget/fisher.hpp"

#include "fidget/errors.hpp"

#include <cmath>

namespace fidget {

Eigen::VectorXd fisher_gradients(const Eigen::MatrixXd& x, const GmmModel& gmm) {
  const Eigen::Index k = gmm.components();
  const Eigen::Index d = gmm.dim();
  if (x.cols() != d) {
    throw ModelError("fisher vector: frames have " + std::to_string(x.cols()) + " dims, gmm expects " +
                     std::to_string(d));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * k * d);
  const Eigen::Index t = x.rows();
  if (t == 0) return out;
  const Eigen::MatrixXd gamma = gmm.posteriors(x);
  const Eigen::MatrixXd sigma = gmm.variances.array().sqrt();
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::ArrayXXd z = (x.rowwise() - gmm.means.row(c)).array().rowwise() / sigma.row(c).array();
    const Eigen::ArrayXd g = gamma.col(c).array();
    const Eigen::RowVectorXd gm = (z.colwise() * g).colwise().sum();
    const Eigen::RowVectorXd gs = ((z.square() - 1.0).colwise() * g).colwise().sum();
    const double w = gmm.weights(c);
    out.segment(c * d, d) = gm.transpose() / (static_cast<double>(t) * std::sqrt(w));
    out.segment(k * d + c * d, d) = gs.transpose() / (static_cast<double>(t) * std::sqrt(2.0 * w));
  }
  return out;
}

Eigen::VectorXd improve_fisher(const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v.unaryExpr([](double a) { return std::copysign(std::sqrt(std::abs(a)), a); });
  const double norm = out.norm();
  if (norm > 0.0) out /= norm;
  return out;
}

Eigen::VectorXd fisher_vector(const Eigen::MatrixXd& x, const GmmModel& gmm) {
  return improve_fisher(fisher_gradients(x, gmm));
}

}  // namespace fidget
