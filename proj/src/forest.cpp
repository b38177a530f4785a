#include "fidget/forest.hpp"

#include "fidget/errors.hpp"
#include "fidget/random.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace fidget {

namespace {

double gini(double n1, double n) {
  if (n <= 0.0) return 0.0;
  const double p = n1 / n;
  return 2.0 * p * (1.0 - p);
}

struct Builder {
  const Eigen::MatrixXd& x;
  const std::vector<int>& y;
  const ForestConfig& cfg;
  int max_features;
  Rng& rng;
  std::vector<double>& importance;
  RandomForest::Tree tree;
  std::vector<int> feature_pool;

  int build(std::vector<int>& idx, int depth) {
    const int node_id = static_cast<int>(tree.size());
    tree.emplace_back();
    double n1 = 0.0;
    for (int i : idx) n1 += y[static_cast<std::size_t>(i)];
    const double n = static_cast<double>(idx.size());
    tree[static_cast<std::size_t>(node_id)].p1 = n1 / n;
    const double parent_gini = gini(n1, n);
    if (depth >= cfg.max_depth || parent_gini == 0.0 ||
        idx.size() < static_cast<std::size_t>(2 * cfg.min_samples_leaf))
      return node_id;

    // Sample candidate features without replacement (partial Fisher-Yates).
    const int nf = static_cast<int>(feature_pool.size());
    for (int k = 0; k < max_features; ++k) {
      const int j = k + static_cast<int>(rng.index(static_cast<std::size_t>(nf - k)));
      std::swap(feature_pool[static_cast<std::size_t>(k)], feature_pool[static_cast<std::size_t>(j)]);
    }

    double best_score = parent_gini - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> vals(idx.size());
    const int min_leaf = std::max(1, cfg.min_samples_leaf);
    for (int k = 0; k < max_features; ++k) {
      const int f = feature_pool[static_cast<std::size_t>(k)];
      for (std::size_t s = 0; s < idx.size(); ++s) vals[s] = {x(idx[s], f), y[static_cast<std::size_t>(idx[s])]};
      std::sort(vals.begin(), vals.end());
      double left_n1 = 0.0;
      for (std::size_t s = 0; s + 1 < vals.size(); ++s) {
        left_n1 += vals[s].second;
        if (vals[s].first == vals[s + 1].first) continue;
        const double ln = static_cast<double>(s + 1);
        const double rn = n - ln;
        if (ln < min_leaf || rn < min_leaf) continue;
        const double score = (ln * gini(left_n1, ln) + rn * gini(n1 - left_n1, rn)) / n;
        if (score < best_score) {
          best_score = score;
          best_feature = f;
          best_threshold = 0.5 * (vals[s].first + vals[s + 1].first);
        }
      }
    }
    if (best_feature < 0) return node_id;

    importance[static_cast<std::size_t>(best_feature)] += n * (parent_gini - best_score);
    std::vector<int> left, right;
    for (int i : idx) (x(i, best_feature) <= best_threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    auto& node = tree[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }
};

}  // namespace

void RandomForest::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, const ForestConfig& config) {
  if (x.rows() != static_cast<Eigen::Index>(y.size())) throw DataError("forest: X and y differ in length");
  if (x.rows() == 0) throw DataError("forest: no training samples");
  if (!x.allFinite()) throw DataError("forest: non-finite training features");
  n_features_ = static_cast<int>(x.cols());
  int mf = config.max_features > 0 ? config.max_features
                                   : static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_features_))));
  mf = std::clamp(mf, 1, n_features_);

  Rng rng(config.seed);
  trees_.clear();
  importances_.assign(static_cast<std::size_t>(n_features_), 0.0);
  std::vector<double> total(static_cast<std::size_t>(n_features_), 0.0);
  const auto n = static_cast<std::size_t>(x.rows());
  for (int t = 0; t < config.n_trees; ++t) {
    std::vector<int> idx(n);
    if (config.bootstrap) {
      for (auto& i : idx) i = static_cast<int>(rng.index(n));
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    std::vector<double> imp(static_cast<std::size_t>(n_features_), 0.0);
    Builder b{x, y, config, mf, rng, imp, {}, {}};
    b.feature_pool.resize(static_cast<std::size_t>(n_features_));
    std::iota(b.feature_pool.begin(), b.feature_pool.end(), 0);
    b.build(idx, 0);
    trees_.push_back(std::move(b.tree));
    for (std::size_t f = 0; f < imp.size(); ++f) total[f] += imp[f];
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0)
    for (std::size_t f = 0; f < total.size(); ++f) importances_[f] = total[f] / sum;
}

double RandomForest::predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  if (trees_.empty()) throw ModelError("forest is not trained");
  if (row.size() != n_features_)
    throw ModelError("forest expects " + std::to_string(n_features_) + " features, got " + std::to_string(row.size()));
  double acc = 0.0;
  for (const auto& tree : trees_) {
    int node = 0;
    while (tree[static_cast<std::size_t>(node)].feature >= 0) {
      const auto& nd = tree[static_cast<std::size_t>(node)];
      node = row(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    acc += tree[static_cast<std::size_t>(node)].p1;
  }
  return acc / static_cast<double>(trees_.size());
}

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ModelError("truncated forest model");
  return v;
}

}  // namespace

void RandomForest::write(std::ostream& out) const {
  put<std::int32_t>(out, n_features_);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(trees_.size()));
  for (const auto& tree : trees_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tree.size()));
    for (const auto& nd : tree) {
      put<std::int32_t>(out, nd.feature);
      put<double>(out, nd.threshold);
      put<std::int32_t>(out, nd.left);
      put<std::int32_t>(out, nd.right);
      put<double>(out, nd.p1);
    }
  }
  for (double v : importances_) put<double>(out, v);
}

RandomForest RandomForest::read(std::istream& in) {
  RandomForest f;
  f.n_features_ = get<std::int32_t>(in);
  const auto nt = get<std::uint32_t>(in);
  if (f.n_features_ <= 0 || nt > 100000) throw ModelError("corrupt forest header");
  f.trees_.resize(nt);
  for (auto& tree : f.trees_) {
    const auto nn = get<std::uint32_t>(in);
    if (nn == 0 || nn > 10'000'000) throw ModelError("corrupt forest tree size");
    tree.resize(nn);
    for (auto& nd : tree) {
      nd.feature = get<std::int32_t>(in);
      nd.threshold = get<double>(in);
      nd.left = get<std::int32_t>(in);
      nd.right = get<std::int32_t>(in);
      nd.p1 = get<double>(in);
      if (nd.feature >= f.n_features_ || (nd.feature >= 0 && (nd.left < 0 || nd.right < 0 ||
                                                               nd.left >= static_cast<int>(nn) ||
                                                               nd.right >= static_cast<int>(nn))))
        throw ModelError("corrupt forest node");
    }
  }
  f.importances_.resize(static_cast<std::size_t>(f.n_features_));
  for (auto& v : f.importances_) v = get<double>(in);
  return f;
}

}  // namespace fidget
