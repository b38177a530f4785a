#include "fidget/distress.hpp"

#include "fidget/errors.hpp"
#include "fidget/forest.hpp"
#include "fidget/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace fidget {

std::vector<double> smooth_label(int label, double s, int n) {
  if (n < 2) throw std::invalid_argument("label smoothing needs at least two classes");
  if (label < 0 || label >= n) throw std::invalid_argument("label outside class range");
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("smoothing must lie in [0, 1]");
  std::vector<double> t(static_cast<std::size_t>(n), s / n);
  t[static_cast<std::size_t>(label)] = (1.0 - s) + s / n;
  return t;
}

namespace {

void require_two_classes(const std::vector<int>& y, const char* what) {
  std::set<int> c(y.begin(), y.end());
  for (int v : c)
    if (v != 0 && v != 1) throw DataError(std::string(what) + ": labels must be 0 or 1");
  if (c.size() < 2) throw DataError(std::string(what) + ": training labels contain a single class");
}

}  // namespace

std::vector<int> rank_features(const Eigen::MatrixXd& x, const std::vector<int>& y, std::uint64_t seed) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DataError("feature selection: shape mismatch");
  require_two_classes(y, "feature selection");
  RandomForest forest;
  ForestConfig cfg;
  cfg.seed = seed;
  forest.fit(x, y, cfg);
  const auto& imp = forest.feature_importances();
  std::vector<int> order(static_cast<std::size_t>(x.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&imp](int a, int b) {
    return imp[static_cast<std::size_t>(a)] > imp[static_cast<std::size_t>(b)];
  });
  return order;
}

std::vector<int> select_features(const Eigen::MatrixXd& x, const std::vector<int>& y, int rf_num,
                                 std::uint64_t seed) {
  if (rf_num <= 0) throw ConfigError("rf_num must be positive, got " + std::to_string(rf_num));
  if (rf_num >= x.cols()) {
    std::vector<int> all(static_cast<std::size_t>(x.cols()));
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  auto order = rank_features(x, y, seed);
  order.resize(static_cast<std::size_t>(rf_num));
  std::sort(order.begin(), order.end());
  return order;
}

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& x, const std::vector<int>& columns) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] < 0 || columns[i] >= x.cols()) throw ModelError("selected feature index out of range");
    out.col(static_cast<Eigen::Index>(i)) = x.col(columns[i]);
  }
  return out;
}

const char* to_string(DistressKind k) { return k == DistressKind::kMlp ? "mlp" : "lr"; }

DistressKind parse_distress_kind(const std::string& s) {
  if (s == "lr") return DistressKind::kLogistic;
  if (s == "mlp") return DistressKind::kMlp;
  throw ConfigError("classifier must be 'lr' or 'mlp', got '" + s + "'");
}

DistressClassifier DistressClassifier::train(const Eigen::MatrixXd& x, const std::vector<int>& y, DistressKind kind,
                                             double smoothing, std::uint64_t seed, const MlpConfig& mlp) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DataError("distress classifier: shape mismatch");
  require_two_classes(y, "distress classifier");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw ConfigError("smoothing must lie in [0, 1)");
  DistressClassifier c;
  c.kind_ = kind;
  c.scaler_ = Standardizer::fit_shared(x);
  const Eigen::MatrixXd z = c.scaler_.transform(x);
  const Eigen::Index n = z.rows();
  if (kind == DistressKind::kLogistic) {
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = y[static_cast<std::size_t>(i)];
    c.lr_.fit(z, t);
    return c;
  }

  Rng rng(seed ^ 0x31F0ULL);
  const auto in = static_cast<int>(z.cols());
  const int h = mlp.hidden;
  const auto init = [&rng](int out_dim, int in_dim) {
    const double limit = std::sqrt(6.0 / (in_dim + out_dim));
    Eigen::MatrixXd w(out_dim, in_dim);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index col = 0; col < w.cols(); ++col) w(r, col) = rng.uniform(-limit, limit);
    return w;
  };
  c.w1_ = init(h, in);
  c.b1_ = Eigen::VectorXd::Zero(h);
  c.w2_ = init(2, h);
  c.b2_ = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd targets(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto t = smooth_label(y[static_cast<std::size_t>(i)], smoothing);
    targets(i, 0) = t[0];
    targets(i, 1) = t[1];
  }

  // Full-batch Adam on the mean cross-entropy plus an L2 penalty.
  std::array<Eigen::MatrixXd, 4> m1{Eigen::MatrixXd::Zero(h, in), Eigen::MatrixXd::Zero(h, 1),
                                    Eigen::MatrixXd::Zero(2, h), Eigen::MatrixXd::Zero(2, 1)};
  auto m2 = m1;
  constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8;
  const auto adam = [&](Eigen::MatrixXd& p, const Eigen::MatrixXd& g, std::size_t slot, int step) {
    m1[slot] = kB1 * m1[slot] + (1.0 - kB1) * g;
    m2[slot] = kB2 * m2[slot] + (1.0 - kB2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(kB1, step), c2 = 1.0 - std::pow(kB2, step);
    p.array() -= mlp.learning_rate * (m1[slot].array() / c1) / ((m2[slot].array() / c2).sqrt() + kEps);
  };
  for (int step = 1; step <= mlp.epochs; ++step) {
    Eigen::MatrixXd hid = (z * c.w1_.transpose()).rowwise() + c.b1_.transpose();
    hid = hid.array().tanh();
    Eigen::MatrixXd logits = (hid * c.w2_.transpose()).rowwise() + c.b2_.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = logits.row(i).maxCoeff();
      logits.row(i) = (logits.row(i).array() - m).exp();
      logits.row(i) /= logits.row(i).sum();
    }
    const Eigen::MatrixXd dlogit = (logits - targets) / static_cast<double>(n);
    Eigen::MatrixXd gw2 = dlogit.transpose() * hid + mlp.l2 * c.w2_;
    Eigen::MatrixXd gb2 = dlogit.colwise().sum().transpose();
    const Eigen::MatrixXd dh = ((dlogit * c.w2_).array() * (1.0 - hid.array().square())).matrix();
    Eigen::MatrixXd gw1 = dh.transpose() * z + mlp.l2 * c.w1_;
    Eigen::MatrixXd gb1 = dh.colwise().sum().transpose();
    Eigen::MatrixXd b1 = c.b1_, b2 = c.b2_;
    adam(c.w1_, gw1, 0, step);
    adam(b1, gb1, 1, step);
    adam(c.w2_, gw2, 2, step);
    adam(b2, gb2, 3, step);
    c.b1_ = b1.col(0);
    c.b2_ = b2.col(0);
  }
  return c;
}

double DistressClassifier::predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  if (row.size() != scaler_.mean.size()) {
    throw ModelError("distress classifier expects " + std::to_string(scaler_.mean.size()) + " features, got " +
                     std::to_string(row.size()));
  }
  const Eigen::MatrixXd z = scaler_.transform(row);
  if (kind_ == DistressKind::kLogistic) return lr_.predict_proba(z.row(0));
  const Eigen::VectorXd hid = (w1_ * z.row(0).transpose() + b1_).array().tanh();
  const Eigen::VectorXd logits = w2_ * hid + b2_;
  const double m = logits.maxCoeff();
  const double e0 = std::exp(logits(0) - m), e1 = std::exp(logits(1) - m);
  return e1 / (e0 + e1);
}

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json mat_json(const Eigen::MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(vec_json(m.row(r).transpose()));
  return j;
}

Eigen::MatrixXd json_mat(const nlohmann::json& j) {
  if (j.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j.at(0).size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto row = json_vec(j.at(static_cast<std::size_t>(r)));
    if (row.size() != m.cols()) throw ModelError("distress classifier: ragged weight matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

}  // namespace

nlohmann::json DistressClassifier::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  j["mean"] = vec_json(scaler_.mean.transpose());
  j["scale"] = vec_json(scaler_.scale.transpose());
  if (kind_ == DistressKind::kLogistic) {
    j["weights"] = vec_json(lr_.weights());
    j["bias"] = lr_.bias();
  } else {
    j["w1"] = mat_json(w1_);
    j["b1"] = vec_json(b1_);
    j["w2"] = mat_json(w2_);
    j["b2"] = vec_json(b2_);
  }
  return j;
}

DistressClassifier DistressClassifier::from_json(const nlohmann::json& j) {
  try {
    DistressClassifier c;
    c.kind_ = parse_distress_kind(j.at("kind").get<std::string>());
    c.scaler_.mean = json_vec(j.at("mean")).transpose();
    c.scaler_.scale = json_vec(j.at("scale")).transpose();
    const auto dim = c.scaler_.mean.size();
    if (c.scaler_.scale.size() != dim) throw ModelError("distress classifier: standardizer width mismatch");
    if (c.kind_ == DistressKind::kLogistic) {
      Eigen::VectorXd w = json_vec(j.at("weights"));
      if (w.size() != dim) throw ModelError("distress classifier: weight width mismatch");
      c.lr_.set_parameters(std::move(w), j.at("bias").get<double>());
    } else {
      c.w1_ = json_mat(j.at("w1"));
      c.b1_ = json_vec(j.at("b1"));
      c.w2_ = json_mat(j.at("w2"));
      c.b2_ = json_vec(j.at("b2"));
      if (c.w1_.cols() != dim || c.w1_.rows() != c.b1_.size() || c.w2_.rows() != 2 ||
          c.w2_.cols() != c.w1_.rows() || c.b2_.size() != 2)
        throw ModelError("distress classifier: inconsistent layer shapes");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("distress classifier: ") + e.what());
  } catch (const ConfigError& e) {
    throw ModelError(std::string("distress classifier: ") + e.what());
  }
}

}  // namespace fidget
