#pragma once

#include "fidget/gmm.hpp"

#include <Eigen/Dense>

namespace fidget {

// Fisher vector of a T x d frame set: the K mean-gradient blocks followed by
// the K variance-gradient blocks, each of width d,
//   G_mu_k    = 1/(T sqrt(w_k))   sum_t g_tk (x_t - mu_k) / sigma_k
//   G_sigma_k = 1/(T sqrt(2 w_k)) sum_t g_tk [(x_t - mu_k)^2 / sigma_k^2 - 1]
Eigen::VectorXd fisher_gradients(const Eigen::MatrixXd& x, const GmmModel& gmm);

// Signed square root followed by L2 normalization. A zero vector is returned
// unchanged.
Eigen::VectorXd improve_fisher(const Eigen::VectorXd& v);

// Improved Fisher vector, length 2 K d.
Eigen::VectorXd fisher_vector(const Eigen::MatrixXd& x, const GmmModel& gmm);

}  // namespace fidget
