#include "helpers.hpp"
#include "oracles.hpp"

#include "fidget/ddae.hpp"
#include "fidget/distress.hpp"
#include "fidget/errors.hpp"
#include "fidget/fisher.hpp"
#include "fidget/gmm.hpp"
#include "fidget/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fidget;

namespace {

Eigen::MatrixXd normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

GmmModel random_gmm(Rng& rng, int k, int d) {
  GmmModel g;
  g.weights.resize(k);
  g.means.resize(k, d);
  g.variances.resize(k, d);
  for (int c = 0; c < k; ++c) {
    g.weights(c) = rng.uniform(0.2, 1.0);
    for (int j = 0; j < d; ++j) {
      g.means(c, j) = rng.uniform(-1.5, 1.5);
      g.variances(c, j) = rng.uniform(0.3, 2.0);
    }
  }
  g.weights /= g.weights.sum();
  return g;
}

}  // namespace

TEST_CASE("ddae architecture widths") {
  auto a = ddae_architecture({40});
  CHECK(a.encoder_dims == std::vector<int>{20});
  CHECK(a.latent_dim == 10);
  CHECK(a.decoder_dims == std::vector<int>{20});
  a = ddae_architecture({40, 8, 13});
  CHECK(a.encoder_dims == std::vector<int>{20, 4, 7});
  CHECK(a.latent_dim == 16);
  CHECK(a.decoder_dims == std::vector<int>{20, 4, 7});
  CHECK(default_group_weight("Fidget") == 0.35);
  CHECK(default_group_weight("Fidget_pure") == 0.35);
  CHECK(default_group_weight("AUs") == 0.1);
}

TEST_CASE("ddae gradient matches central differences") {
  DdaeModel model({{"a", 3, 0.35}, {"b", 4, 0.1}}, 17);
  Rng rng(2);
  const GroupFrames input = {normal_matrix(rng, 6, 3), normal_matrix(rng, 6, 4)};
  const GroupFrames target = {normal_matrix(rng, 6, 3), normal_matrix(rng, 6, 4)};
  std::vector<double> grad;
  model.loss(input, target, &grad);
  auto p = model.parameters();
  REQUIRE(grad.size() == p.size());
  REQUIRE(p.size() == model.parameter_count());
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    model.set_parameters(p);
    const double up = model.loss(input, target);
    p[i] = keep - h;
    model.set_parameters(p);
    const double down = model.loss(input, target);
    p[i] = keep;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(numeric - grad[i]) / std::max({std::abs(numeric), std::abs(grad[i]), 1e-3}));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("ddae training reduces reconstruction loss") {
  Rng rng(4);
  const Eigen::MatrixXd base = normal_matrix(rng, 1000, 3);
  Eigen::MatrixXd a = base * normal_matrix(rng, 3, 8) + 0.1 * normal_matrix(rng, 1000, 8);
  Eigen::MatrixXd b = base * normal_matrix(rng, 3, 5) + 0.1 * normal_matrix(rng, 1000, 5);
  DdaeConfig cfg;
  cfg.max_epochs = 15;
  cfg.seed = 3;
  DdaeHistory hist;
  const auto model = train_ddae({{"Fidget", 8, 0.35}, {"AUs", 5, 0.1}}, {a, b}, cfg, &hist);
  CHECK(hist.final_loss < hist.initial_loss);
  CHECK(model.latent_dim() == 4);
  const auto z1 = model.encode({a, b});
  CHECK(z1.rows() == 1000);
  CHECK(z1.isApprox(model.encode({a, b}), 0.0));
  const auto zero = model.encode({Eigen::MatrixXd::Zero(2, 8), Eigen::MatrixXd::Zero(2, 5)});
  CHECK(zero.allFinite());
  const auto back = DdaeModel::from_json(model.to_json());
  CHECK(back.encode({a, b}) == z1);
  CHECK_THROWS_AS(model.encode({a}), DataError);
  Eigen::MatrixXd bad = a;
  bad(3, 2) = std::nan("");
  CHECK_THROWS_AS(train_ddae({{"Fidget", 8, 0.35}, {"AUs", 5, 0.1}}, {bad, b}, cfg), DataError);
}

TEST_CASE("ddae reconstructs noiseless low-rank data") {
  Rng rng(6);
  Eigen::MatrixXd x(1000, 4);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double u = rng.uniform(-1, 1);
    x.row(i) << u, 0.5 * u, -u, 2 * u;
  }
  DdaeConfig cfg;
  cfg.noise = 0.0;
  cfg.max_epochs = 300;
  cfg.patience = 300;
  cfg.learning_rate = 5e-3;
  cfg.seed = 1;
  DdaeHistory hist;
  train_ddae({{"x", 4, 1.0}}, {x}, cfg, &hist);
  CHECK(hist.final_loss < 1e-3);
}

TEST_CASE("gmm recovers separated components") {
  Rng rng(8);
  Eigen::MatrixXd x(600, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double cx = i % 2 == 0 ? -4.0 : 4.0;
    x.row(i) << cx + 0.5 * rng.normal(), 1.0 + 0.5 * rng.normal();
  }
  GmmConfig cfg;
  cfg.components = 2;
  const auto fit = fit_gmm(x, cfg);
  auto m = fit.model.means;
  if (m(0, 0) > m(1, 0)) m.row(0).swap(m.row(1));
  CHECK(std::abs(m(0, 0) + 4.0) < 0.1);
  CHECK(std::abs(m(1, 0) - 4.0) < 0.1);
  CHECK(std::abs(m(0, 1) - 1.0) < 0.1);
  for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i)
    CHECK(fit.log_likelihood[i] >= fit.log_likelihood[i - 1] - 1e-9);
  CHECK(fit.model.posteriors(x).rowwise().sum().isApproxToConstant(1.0, 1e-12));
}

TEST_CASE("single-component gmm is the sample mean and variance") {
  Rng rng(9);
  const Eigen::MatrixXd x = normal_matrix(rng, 200, 3);
  GmmConfig cfg;
  cfg.components = 1;
  const auto g = fit_gmm(x, cfg).model;
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::RowVectorXd var = (x.rowwise() - mu).array().square().colwise().mean();
  CHECK((g.means.row(0) - mu).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((g.variances.row(0) - var).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(fit_gmm(x.topRows(1), GmmConfig{}), DataError);
}

TEST_CASE("gmm variance floor") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(50, 2);
  GmmConfig cfg;
  cfg.components = 1;
  const auto g = fit_gmm(x, cfg).model;
  CHECK(g.variances.minCoeff() >= cfg.variance_floor);
}

TEST_CASE("fisher vector length") {
  Rng rng(10);
  for (auto [k, d] : std::vector<std::pair<int, int>>{{1, 2}, {16, 8}, {32, 16}}) {
    const auto g = random_gmm(rng, k, d);
    CHECK(fisher_vector(normal_matrix(rng, 40, d), g).size() == 2 * k * d);
  }
}

TEST_CASE("fisher vector matches a brute-force implementation") {
  Rng rng(12);
  const Eigen::MatrixXd x = normal_matrix(rng, 50, 4);
  const auto g = random_gmm(rng, 2, 4);
  const auto raw = fisher_gradients(x, g);
  const auto fv = fisher_vector(x, g);
  const auto raw_oracle = oracle::fisher_vector(x, g, false);
  const auto fv_oracle = oracle::fisher_vector(x, g, true);
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    CHECK(std::abs(raw(i) - raw_oracle[static_cast<std::size_t>(i)]) < 1e-6);
    CHECK(std::abs(fv(i) - fv_oracle[static_cast<std::size_t>(i)]) < 1e-6);
  }
  CHECK(fv.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((improve_fisher(fv) - fv).norm() > 1e-3);
  CHECK(improve_fisher(Eigen::VectorXd::Zero(4)).isZero());
}

TEST_CASE("fisher mean block vanishes at the mean") {
  GmmModel g;
  g.weights = Eigen::VectorXd::Ones(1);
  g.means = Eigen::MatrixXd(1, 3);
  g.means << 0.5, -1.0, 2.0;
  g.variances = Eigen::MatrixXd::Ones(1, 3);
  const Eigen::MatrixXd x = g.means.replicate(10, 1);
  const auto v = fisher_gradients(x, g);
  CHECK(v.head(3).isZero(1e-15));
  CHECK(v.tail(3).isApproxToConstant(-1.0 / std::sqrt(2.0), 1e-12));
}

TEST_CASE("label smoothing") {
  CHECK(smooth_label(0, 0.0) == std::vector<double>{1.0, 0.0});
  CHECK(smooth_label(1, 0.0) == std::vector<double>{0.0, 1.0});
  const auto a = smooth_label(1, 0.2), b = smooth_label(0, 0.2), c = smooth_label(1, 0.4);
  CHECK(a[0] == doctest::Approx(0.1));
  CHECK(a[1] == doctest::Approx(0.9));
  CHECK(b[0] == doctest::Approx(0.9));
  CHECK(c[0] == doctest::Approx(0.2));
  CHECK(c[1] == doctest::Approx(0.8));
  const auto lim = smooth_label(1, 1.0);
  CHECK(lim[0] == 0.5);
  CHECK(lim[1] == 0.5);
  CHECK_THROWS(smooth_label(2, 0.1));
  CHECK(depression_label(7) == 1);
  CHECK(depression_label(6) == 0);
  CHECK(anxiety_label(6) == 1);
  CHECK(anxiety_label(5) == 0);
}

TEST_CASE("forest feature selection") {
  Rng rng(13);
  Eigen::MatrixXd x = normal_matrix(rng, 60, 12);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    y[static_cast<std::size_t>(i)] = i % 2;
    x(i, 7) = i % 2;
  }
  CHECK(rank_features(x, y, 1).front() == 7);
  CHECK(select_features(x, y, 1, 1) == std::vector<int>{7});
  std::vector<int> all(12);
  for (int i = 0; i < 12; ++i) all[static_cast<std::size_t>(i)] = i;
  CHECK(select_features(x, y, 12, 1) == all);
  CHECK_THROWS_AS(select_features(x, y, 0, 1), ConfigError);
  CHECK(take_columns(x, {7}).col(0) == x.col(7));
}

TEST_CASE("distress classifiers") {
  Rng rng(14);
  Eigen::MatrixXd x = normal_matrix(rng, 40, 6);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    y[static_cast<std::size_t>(i)] = i % 2;
    x(i, 2) += (i % 2 == 0 ? -3.0 : 3.0);
  }
  for (auto kind : {DistressKind::kLogistic, DistressKind::kMlp}) {
    const auto c = DistressClassifier::train(x, y, kind, 0.2, 5);
    int correct = 0;
    for (int i = 0; i < 40; ++i) correct += c.predict(x.row(i)) == y[static_cast<std::size_t>(i)];
    CHECK(correct == 40);
    const auto back = DistressClassifier::from_json(c.to_json());
    CHECK(back.predict_proba(x.row(3)) == c.predict_proba(x.row(3)));
    CHECK_THROWS_AS(c.predict_proba(Eigen::RowVectorXd::Zero(5)), ModelError);
  }
  std::vector<int> one(40, 1);
  CHECK_THROWS_AS(DistressClassifier::train(x, one, DistressKind::kLogistic, 0.0, 1), DataError);
  CHECK_THROWS_AS(parse_distress_kind("svm"), ConfigError);
}
