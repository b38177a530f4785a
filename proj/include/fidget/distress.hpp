#pragma once

#include "fidget/linear.hpp"

#include <Eigen/Dense>

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fidget {

// PHQ-8 above 6.63 marks depression, GAD-7 above 5.57 marks anxiety.
inline constexpr double kPhqThreshold = 6.63;
inline constexpr double kGadThreshold = 5.57;
inline int depression_label(double phq8) { return phq8 > kPhqThreshold ? 1 : 0; }
inline int anxiety_label(double gad7) { return gad7 > kGadThreshold ? 1 : 0; }

// One-hot target of `label` over n classes smoothed to L (1 - s) + s / n.
std::vector<double> smooth_label(int label, double s, int n = 2);

// Features ranked by forest importance, highest first; ties keep the lower
// index first.
std::vector<int> rank_features(const Eigen::MatrixXd& x, const std::vector<int>& y, std::uint64_t seed);

// The rf_num most important columns (ascending column order). rf_num at or
// above the column count selects every column. Throws ConfigError for
// rf_num <= 0.
std::vector<int> select_features(const Eigen::MatrixXd& x, const std::vector<int>& y, int rf_num,
                                 std::uint64_t seed);

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& x, const std::vector<int>& columns);

enum class DistressKind { kLogistic, kMlp };
const char* to_string(DistressKind k);
DistressKind parse_distress_kind(const std::string& s);

struct MlpConfig {
  int hidden = 64;
  int epochs = 300;
  double learning_rate = 0.01;
  double l2 = 1e-4;
};

// Binary distress classifier on centred features sharing one scale (see
// Standardizer::fit_shared). LR is fitted on the
// hard labels and thresholded at 0.5; the MLP (one tanh hidden layer, two
// softmax outputs) is trained on smoothed targets.
class DistressClassifier {
 public:
  static DistressClassifier train(const Eigen::MatrixXd& x, const std::vector<int>& y, DistressKind kind,
                                  double smoothing, std::uint64_t seed, const MlpConfig& mlp = {});

  DistressKind kind() const { return kind_; }
  // Probability of class 1.
  double predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const { return predict_proba(row) >= 0.5 ? 1 : 0; }

  nlohmann::json to_json() const;
  static DistressClassifier from_json(const nlohmann::json& j);

 private:
  DistressKind kind_ = DistressKind::kLogistic;
  Standardizer scaler_;
  LogisticRegression lr_{1.0};
  Eigen::MatrixXd w1_;  // hidden x in
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;  // 2 x hidden
  Eigen::VectorXd b2_;
};

}  // namespace fidget
