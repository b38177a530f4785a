#pragma once

#include "fidget/analysis.hpp"
#include "fidget/config.hpp"
#include "fidget/corpus.hpp"
#include "fidget/fidgets.hpp"
#include "fidget/fusion.hpp"
#include "fidget/gestures.hpp"
#include "fidget/metrics.hpp"
#include "fidget/motion.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fidget {

struct PipelineOptions {
  AdaptorConfig adaptors;
  SliceConfig slices;
  GestureConfig gestures;
  ActionTrainConfig action;
};
PipelineOptions pipeline_options(const RunConfig& config);

struct SliceInfo {
  SliceCategory category = SliceCategory::kBoth;
  LocationCode code = LocationCode::kHF;
  std::size_t start = 0, length = 0;
};

// One session after preprocessing, adaptor detection, slicing and gesture
// statistics.
struct ProcessedSession {
  std::string id;
  Session raw;
  PoseSequence pose;          // preprocessed
  LocationTimeline timeline;  // detected
  std::vector<SliceInfo> slices;
  std::vector<SliceFeatures> features;
  GestureFeatureVector gestures;
  std::optional<GroundTruth> truth;
  std::vector<int> slice_truth;  // 1 DYNAMIC, 0 STATIC, -1 without ground truth
};

ProcessedSession process_session(const SessionSource& source, const KeypointSchema& schema, double fps,
                                 const PipelineOptions& options);
std::vector<ProcessedSession> process_corpus(const Corpus& corpus, const PipelineOptions& options);

// DYNAMIC when at least half of the slice's frames move in the ground truth of
// its channel (BOTH reads the left hand).
int slice_truth_label(const GroundTruth& truth, const SliceInfo& slice);

// One classifier per category from the ground-truth slice labels of the
// given participants (all when null). Categories with a single class are
// skipped with a warning.
ActionModelSet fit_action_models(const std::vector<ProcessedSession>& sessions,
                                 const std::set<std::string>* participants, const ActionTrainConfig& config);

// Slices without a model for their category are labelled STATIC.
std::vector<SliceAction> classify_slices(const ProcessedSession& session, const ActionModelSet& models,
                                         std::vector<double>* scores = nullptr);

FidgetMatrix session_fidgets(const ProcessedSession& session, const ActionModelSet& models, bool speaking);

// Per-frame group matrices in `groups` order. Throws DataError when a
// sidecar group is missing.
SessionFrames build_frames(const ProcessedSession& session, const ActionModelSet& models,
                           const std::vector<std::string>& groups);

// Frame-level self-adaptor detection against ground truth. Hand positives are
// non-HF frames, leg positives L2L frames; a detection counts only with the
// exact code.
struct DetectionCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0; }
  double recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
};
struct DetectionScore {
  DetectionCounts hands, legs, total;
};
DetectionScore detection_score(const LocationTimeline& detected, const LocationTimeline& truth);

struct MotionCategoryResult {
  SliceCategory category = SliceCategory::kBoth;
  std::size_t slices = 0, dynamic = 0;
  std::optional<CvReport> cv;
  std::string skipped;  // reason when no CV was run
};

struct EvaluationReport {
  DetectionScore detection;
  std::vector<MotionCategoryResult> motion;
  double motion_accuracy = 0.0;  // slice-weighted over evaluated categories
  double motion_f1 = 0.0;
  CvResult fusion;
  std::vector<double> permutation;
  double permutation_mean = 0.0;
  bool leak_checked = false;

  nlohmann::ordered_json to_json() const;
};

EvaluationReport evaluate_corpus(const Corpus& corpus, const std::vector<ProcessedSession>& sessions,
                                 const RunConfig& config);

struct AnalysisReport {
  std::vector<std::string> names;
  Eigen::MatrixXd features;  // participants x features
  std::vector<std::string> participants;
  std::vector<int> labels;
  LinearResult linear;
  std::vector<PolarityEntry> polarity;
  SearchResult search;

  nlohmann::ordered_json to_json() const;
  // Best subsets first; at most `limit` rows.
  std::string search_log_csv(std::size_t limit) const;
};

// Gesture statistics and averaged pure fidget rows per participant.
AnalysisReport analyze_corpus(const Corpus& corpus, const std::vector<ProcessedSession>& sessions,
                              const ActionModelSet& models, const RunConfig& config);

}  // namespace fidget
