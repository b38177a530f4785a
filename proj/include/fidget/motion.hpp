#pragma once

#include "fidget/adaptors.hpp"
#include "fidget/forest.hpp"
#include "fidget/linear.hpp"
#include "fidget/pose.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fidget {

enum class SliceCategory : std::uint8_t { kBoth = 0, kLeft = 1, kRight = 2, kLeg = 3 };
inline constexpr std::array<SliceCategory, 4> kSliceCategories = {
    SliceCategory::kBoth, SliceCategory::kLeft, SliceCategory::kRight, SliceCategory::kLeg};
const char* to_string(SliceCategory c);
SliceCategory parse_slice_category(const std::string& s);

enum class ActionLabel : std::uint8_t { kStatic = 0, kDynamic = 1 };
const char* to_string(ActionLabel a);

struct SliceConfig {
  std::size_t length = 100;
  std::size_t step = 50;
};

// A fixed-length window inside one run of a single location code.
struct TrajectorySlice {
  SliceCategory category = SliceCategory::kBoth;
  LocationCode code = LocationCode::kH2H;
  std::size_t start = 0;      // first frame of the window
  std::size_t run_start = 0;  // run of `code` the window was cut from, [run_start, run_end)
  std::size_t run_end = 0;
  Eigen::MatrixXd trajectories;  // (2 * keypoints) x length: x row then y row per keypoint

  std::size_t length() const { return static_cast<std::size_t>(trajectories.cols()); }
  double center() const { return static_cast<double>(start) + static_cast<double>(length() - 1) / 2.0; }
};

std::vector<int> category_points(const KeypointSchema& schema, SliceCategory category);

// One slice per (category, window) where a single location code covers the
// whole window. H2H runs feed BOTH; other hand runs (including HF) feed
// LEFT/RIGHT; leg runs feed LEG. Windows start at the run start and advance
// by `step` while they fit.
std::vector<TrajectorySlice> slice_sessions(const PoseSequence& seq, const LocationTimeline& timeline,
                                            const SliceConfig& config = {});

// Fixed analysis band: 41 frequencies 0.50, 0.55, ..., 2.50 Hz.
inline constexpr int kBandPoints = 41;
inline constexpr double kBandLowHz = 0.5;
inline constexpr double kBandStepHz = 0.05;
std::array<double, kBandPoints> band_grid();

// Magnitude of the zero-padded spectrum of the mean-removed trajectory,
// evaluated exactly at the band grid frequencies.
std::array<double, kBandPoints> band_spectrum(std::span<const double> trajectory, double fps);

struct SliceFeatures {
  std::vector<double> fft;   // kBandPoints, averaged over trajectories
  std::vector<double> std;   // per trajectory, raw positions
  std::vector<double> mean;  // per trajectory, raw positions

  std::size_t dim() const { return fft.size() + std.size() + mean.size(); }
  Eigen::RowVectorXd flatten() const;
};

SliceFeatures slice_features(const TrajectorySlice& slice, double fps);

enum class ClassifierKind : std::uint8_t { kForest = 0, kLinear = 1 };

struct ActionTrainConfig {
  ClassifierKind kind = ClassifierKind::kForest;
  int n_trees = 100;
  int max_depth = 8;
  int folds = 5;
  std::uint64_t seed = 0;
};

class ActionClassifier {
 public:
  ActionClassifier() = default;

  static ActionClassifier train(SliceCategory category, const Eigen::MatrixXd& x,
                                const std::vector<int>& labels, const ActionTrainConfig& config);

  SliceCategory category() const { return category_; }
  ClassifierKind kind() const { return kind_; }
  int feature_dim() const { return dim_; }
  // Probability of DYNAMIC. Throws ModelError on a dimension mismatch.
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& features) const;

  void write(std::ostream& out) const;
  static ActionClassifier read(std::istream& in);

 private:
  SliceCategory category_ = SliceCategory::kBoth;
  ClassifierKind kind_ = ClassifierKind::kForest;
  int dim_ = 0;
  RandomForest forest_;
  Standardizer scaler_;
  LogisticRegression linear_{1.0};
};

ActionLabel classify_slice(const ActionClassifier& classifier, const SliceFeatures& features);

// Accuracy/F1 (DYNAMIC as positive) across participant-disjoint folds.
struct CvReport {
  std::vector<double> fold_accuracy;
  std::vector<double> fold_f1;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
  std::vector<std::vector<std::string>> fold_participants;
};

struct TrainedAction {
  ActionClassifier classifier;  // fitted on all slices
  CvReport cv;
};

// Participants are partitioned into `folds` groups; every slice of a
// participant lands in that participant's fold. Throws DataError for a
// single-class label set or fewer participants than folds.
TrainedAction train_action_classifier(SliceCategory category, const std::vector<SliceFeatures>& features,
                                      const std::vector<int>& labels,
                                      const std::vector<std::string>& participants,
                                      const ActionTrainConfig& config = {});

// Versioned binary model file holding one classifier per trained category.
class ActionModelSet {
 public:
  static constexpr std::uint32_t kVersion = 1;

  void set(ActionClassifier c) { models_[c.category()] = std::move(c); }
  const ActionClassifier* get(SliceCategory c) const;
  std::size_t size() const { return models_.size(); }

  void save(const std::filesystem::path& path) const;
  static ActionModelSet load(const std::filesystem::path& path);
  // Hash of the feature layout the models were trained against.
  static std::uint64_t schema_hash();

 private:
  std::map<SliceCategory, ActionClassifier> models_;
};

}  // namespace fidget
