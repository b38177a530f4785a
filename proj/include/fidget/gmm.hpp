#pragma once

#include <Eigen/Dense>

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace fidget {

struct GmmConfig {
  int components = 32;
  int max_iterations = 100;
  double tolerance = 1e-6;  // relative change of the mean log-likelihood
  double variance_floor = 1e-6;
  std::size_t max_frames = 50000;
  std::uint64_t seed = 0;
};

// Diagonal-covariance Gaussian mixture. Rows of `means`/`variances` are
// components.
struct GmmModel {
  Eigen::VectorXd weights;
  Eigen::MatrixXd means;
  Eigen::MatrixXd variances;

  int components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }

  // log(w_k N(x_t | mu_k, var_k)), T x K.
  Eigen::MatrixXd log_joint(const Eigen::MatrixXd& x) const;
  // Posterior responsibilities, T x K; rows sum to 1.
  Eigen::MatrixXd posteriors(const Eigen::MatrixXd& x) const;
  double mean_log_likelihood(const Eigen::MatrixXd& x) const;

  nlohmann::json to_json() const;
  static GmmModel from_json(const nlohmann::json& j);
};

struct GmmFit {
  GmmModel model;
  std::vector<double> log_likelihood;  // mean per frame, after initialization and after each EM step
  bool converged = false;
};

// k-means++ seeding then EM. Frames beyond max_frames are subsampled.
// Throws DataError when there are fewer rows than components.
GmmFit fit_gmm(const Eigen::MatrixXd& x, const GmmConfig& config);

}  // namespace fidget
