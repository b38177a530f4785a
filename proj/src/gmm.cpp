#include "fidget/gmm.hpp"

#include "fidget/errors.hpp"
#include "fidget/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace fidget {

Eigen::MatrixXd GmmModel::log_joint(const Eigen::MatrixXd& x) const {
  if (x.cols() != dim()) {
    throw ModelError("gmm expects " + std::to_string(dim()) + "-dimensional frames, got " +
                     std::to_string(x.cols()));
  }
  const Eigen::ArrayXXd prec = variances.array().inverse();  // K x d
  // -0.5 * sum_j (x_j - mu_j)^2 / var_j expanded into matrix products.
  const Eigen::MatrixXd quad = x.array().square().matrix() * prec.matrix().transpose() -
                               2.0 * x * (means.array() * prec).matrix().transpose();
  const Eigen::ArrayXd mu_term = (means.array().square() * prec).rowwise().sum();
  const Eigen::ArrayXd log_det = variances.array().log().rowwise().sum();
  const double c = static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi);
  Eigen::MatrixXd out = -0.5 * quad;
  for (Eigen::Index k = 0; k < out.cols(); ++k)
    out.col(k).array() += std::log(weights(k)) - 0.5 * (mu_term(k) + log_det(k) + c);
  return out;
}

namespace {

// Row-wise log-sum-exp of a T x K matrix; writes normalized posteriors.
Eigen::VectorXd normalize_rows(Eigen::MatrixXd& lj) {
  Eigen::VectorXd lse(lj.rows());
  for (Eigen::Index t = 0; t < lj.rows(); ++t) {
    const double m = lj.row(t).maxCoeff();
    const double s = (lj.row(t).array() - m).exp().sum();
    lse(t) = m + std::log(s);
    lj.row(t) = (lj.row(t).array() - lse(t)).exp();
  }
  return lse;
}

}  // namespace

Eigen::MatrixXd GmmModel::posteriors(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd lj = log_joint(x);
  normalize_rows(lj);
  return lj;
}

double GmmModel::mean_log_likelihood(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd lj = log_joint(x);
  return normalize_rows(lj).mean();
}

nlohmann::json GmmModel::to_json() const {
  nlohmann::json j;
  j["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
  j["means"] = nlohmann::json::array();
  j["variances"] = nlohmann::json::array();
  for (Eigen::Index k = 0; k < means.rows(); ++k) {
    std::vector<double> m(static_cast<std::size_t>(means.cols())), v(m.size());
    for (Eigen::Index c = 0; c < means.cols(); ++c) {
      m[static_cast<std::size_t>(c)] = means(k, c);
      v[static_cast<std::size_t>(c)] = variances(k, c);
    }
    j["means"].push_back(m);
    j["variances"].push_back(v);
  }
  return j;
}

GmmModel GmmModel::from_json(const nlohmann::json& j) {
  try {
    GmmModel g;
    const auto w = j.at("weights").get<std::vector<double>>();
    const auto k = static_cast<Eigen::Index>(w.size());
    if (k == 0 || j.at("means").size() != w.size() || j.at("variances").size() != w.size())
      throw ModelError("gmm: component count mismatch");
    const auto d = static_cast<Eigen::Index>(j.at("means").at(0).size());
    g.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), k);
    g.means.resize(k, d);
    g.variances.resize(k, d);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto m = j.at("means").at(static_cast<std::size_t>(i)).get<std::vector<double>>();
      const auto v = j.at("variances").at(static_cast<std::size_t>(i)).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(m.size()) != d || static_cast<Eigen::Index>(v.size()) != d)
        throw ModelError("gmm: ragged component parameters");
      for (Eigen::Index c = 0; c < d; ++c) {
        g.means(i, c) = m[static_cast<std::size_t>(c)];
        g.variances(i, c) = v[static_cast<std::size_t>(c)];
      }
    }
    if ((g.variances.array() <= 0.0).any() || (g.weights.array() <= 0.0).any())
      throw ModelError("gmm: non-positive weights or variances");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("gmm model: ") + e.what());
  }
}

GmmFit fit_gmm(const Eigen::MatrixXd& input, const GmmConfig& config) {
  const int k = config.components;
  if (k <= 0) throw std::invalid_argument("gmm needs at least one component");
  if (input.rows() < k) {
    throw DataError("gmm with " + std::to_string(k) + " components needs at least as many frames, got " +
                    std::to_string(input.rows()));
  }
  if (!input.allFinite()) throw DataError("gmm input contains non-finite values");
  Rng rng(config.seed ^ 0x63A1ULL);

  Eigen::MatrixXd x;
  if (static_cast<std::size_t>(input.rows()) > config.max_frames) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(input.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    idx.resize(config.max_frames);
    std::sort(idx.begin(), idx.end());
    x.resize(static_cast<Eigen::Index>(idx.size()), input.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = input.row(idx[i]);
  } else {
    x = input;
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();

  // k-means++ seeding.
  Eigen::MatrixXd centers(k, d);
  centers.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  Eigen::VectorXd dist = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        r -= dist(pick);
        if (r < 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    }
    centers.row(c) = x.row(pick);
    dist = dist.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::RowVectorXd var =
      ((x.rowwise() - mu).array().square().colwise().sum() / static_cast<double>(n)).max(config.variance_floor);

  GmmFit fit;
  auto& g = fit.model;
  g.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  g.means = centers;
  g.variances = var.replicate(k, 1);

  Eigen::MatrixXd resp = g.log_joint(x);
  double ll = normalize_rows(resp).mean();
  fit.log_likelihood.push_back(ll);
  for (int it = 0; it < config.max_iterations; ++it) {
    const Eigen::VectorXd nk = resp.colwise().sum().transpose().array() + 1e-12;
    g.weights = nk / nk.sum();
    g.means = (resp.transpose() * x).array().colwise() / nk.array();
    const Eigen::MatrixXd ex2 = (resp.transpose() * x.array().square().matrix()).array().colwise() / nk.array();
    g.variances = (ex2.array() - g.means.array().square()).max(config.variance_floor);
    resp = g.log_joint(x);
    const double next = normalize_rows(resp).mean();
    fit.log_likelihood.push_back(next);
    const double change = next - ll;
    ll = next;
    if (std::abs(change) <= config.tolerance * std::max(1.0, std::abs(ll))) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace fidget
