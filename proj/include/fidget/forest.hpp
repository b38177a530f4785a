#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fidget {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 8;
  int min_samples_leaf = 1;
  int max_features = 0;  // 0 -> round(sqrt(n_features))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

// Binary CART random forest with Gini splits. Rows of X are samples.
class RandomForest {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double p1 = 0.0;   // fraction of class 1 among training samples at the node
  };
  using Tree = std::vector<Node>;

  void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, const ForestConfig& config);

  // Mean over trees of the leaf class-1 fraction.
  double predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const { return predict_proba(row) >= 0.5 ? 1 : 0; }

  // Mean decrease in Gini impurity, weighted by node sample counts and
  // normalized to sum to 1 (all zeros if no split was made).
  const std::vector<double>& feature_importances() const { return importances_; }
  int n_features() const { return n_features_; }
  std::size_t n_trees() const { return trees_.size(); }

  void write(std::ostream& out) const;
  static RandomForest read(std::istream& in);

 private:
  std::vector<Tree> trees_;
  std::vector<double> importances_;
  int n_features_ = 0;
};

}  // namespace fidget
