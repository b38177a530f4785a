#pragma once

// Scalar reference implementations used to cross-check the library.

#include "fidget/gmm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

// DFT magnitudes of the mean-removed signal zero-padded to `padded` samples,
// bins 0 .. padded/2 - 1.
inline std::vector<double> dft_magnitude(const std::vector<double>& x, std::size_t padded) {
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(x.size());
  std::vector<double> buf(padded, 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) buf[n] = x[n] - mu;
  std::vector<double> mag(padded / 2);
  for (std::size_t k = 0; k < mag.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < padded; ++n)
      acc += buf[n] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * n % padded) /
                                          static_cast<double>(padded));
    mag[k] = std::abs(acc);
  }
  return mag;
}

// Textbook Fisher vector: mean blocks then variance blocks, optionally with
// signed square root and L2 normalization.
inline std::vector<double> fisher_vector(const Eigen::MatrixXd& x, const fidget::GmmModel& g, bool improved) {
  const int k = g.components(), d = g.dim();
  const auto t = static_cast<int>(x.rows());
  std::vector<double> mu_block(static_cast<std::size_t>(k * d), 0.0), var_block(mu_block.size(), 0.0);
  for (int i = 0; i < t; ++i) {
    std::vector<double> logp(static_cast<std::size_t>(k));
    double best = -1e300;
    for (int c = 0; c < k; ++c) {
      double lp = std::log(g.weights(c));
      for (int j = 0; j < d; ++j) {
        const double v = g.variances(c, j), z = x(i, j) - g.means(c, j);
        lp += -0.5 * std::log(2 * std::numbers::pi * v) - 0.5 * z * z / v;
      }
      logp[static_cast<std::size_t>(c)] = lp;
      best = std::max(best, lp);
    }
    double norm = 0.0;
    for (double lp : logp) norm += std::exp(lp - best);
    for (int c = 0; c < k; ++c) {
      const double gamma = std::exp(logp[static_cast<std::size_t>(c)] - best) / norm;
      for (int j = 0; j < d; ++j) {
        const double s = std::sqrt(g.variances(c, j)), u = (x(i, j) - g.means(c, j)) / s;
        mu_block[static_cast<std::size_t>(c * d + j)] += gamma * u;
        var_block[static_cast<std::size_t>(c * d + j)] += gamma * (u * u - 1.0);
      }
    }
  }
  std::vector<double> out;
  for (int c = 0; c < k; ++c)
    for (int j = 0; j < d; ++j)
      out.push_back(mu_block[static_cast<std::size_t>(c * d + j)] / (t * std::sqrt(g.weights(c))));
  for (int c = 0; c < k; ++c)
    for (int j = 0; j < d; ++j)
      out.push_back(var_block[static_cast<std::size_t>(c * d + j)] / (t * std::sqrt(2 * g.weights(c))));
  if (improved) {
    double n2 = 0.0;
    for (auto& v : out) {
      v = (v < 0 ? -1.0 : 1.0) * std::sqrt(std::abs(v));
      n2 += v * v;
    }
    for (auto& v : out) v /= std::sqrt(n2);
  }
  return out;
}

// Savitzky-Golay value at `centre`: least-squares polynomial of `order`
// through the 2 half + 1 surrounding samples.
inline double local_poly_fit(const std::vector<double>& y, int centre, int half, int order) {
  Eigen::MatrixXd a(2 * half + 1, order + 1);
  Eigen::VectorXd b(2 * half + 1);
  for (int k = -half; k <= half; ++k) {
    for (int p = 0; p <= order; ++p) a(k + half, p) = std::pow(static_cast<double>(k), p);
    b(k + half) = y[static_cast<std::size_t>(centre + k)];
  }
  const Eigen::VectorXd c = a.householderQr().solve(b);
  return c(0);
}

}  // namespace oracle
