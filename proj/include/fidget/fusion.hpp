#pragma once

#include "fidget/ddae.hpp"
#include "fidget/distress.hpp"
#include "fidget/gmm.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace fidget {

// Per-frame feature groups and their widths.
int fusion_group_dim(const std::string& name);  // Fidget 9, Fidget_pure 8, Gaze 8, AUs 35, MFCCs 13
const std::vector<std::string>& fusion_group_names();

struct FusionConfig {
  std::vector<std::string> groups = {"Fidget", "Gaze", "AUs", "MFCCs"};
  DdaeConfig ddae;
  GmmConfig gmm;
  int rf_num = 200;
  double smoothing = 0.4;
  DistressKind classifier = DistressKind::kMlp;
  MlpConfig mlp;
  int folds = 3;
  std::uint64_t seed = 0;
};

// One participant's session as per-frame group matrices (frames as rows), in
// FusionConfig::groups order.
struct SessionFrames {
  std::string participant;
  GroupFrames groups;
};

// Participants whose rows each fitted stage consumed.
class Provenance {
 public:
  void record(const std::string& stage, const std::vector<std::string>& row_participants);
  const std::map<std::string, std::set<std::string>>& stages() const { return stages_; }
  bool consumed(const std::string& stage) const { return stages_.count(stage) != 0; }
  // Throws LeakError naming the stage and participant when any stage consumed
  // a held-out participant.
  void audit(const std::vector<std::string>& held_out) const;

 private:
  std::map<std::string, std::set<std::string>> stages_;
};

// DDAE + GMM fitted on training frames; maps a session to its improved
// Fisher vector.
struct EmbeddingStage {
  DdaeModel ddae;
  GmmModel gmm;
  DdaeHistory ddae_history;
  std::vector<double> gmm_log_likelihood;

  Eigen::VectorXd embed(const GroupFrames& frames) const;
};

EmbeddingStage fit_embedding(const std::vector<const SessionFrames*>& train, const FusionConfig& config,
                             std::uint64_t seed, Provenance* provenance = nullptr);

// RF selection + distress classifier fitted on training embeddings.
struct SupervisedStage {
  std::vector<int> selected;
  DistressClassifier classifier;

  double predict_proba(const Eigen::VectorXd& embedding) const;
};

SupervisedStage fit_supervised(const Eigen::MatrixXd& x, const std::vector<int>& y,
                               const std::vector<std::string>& row_participants, const FusionConfig& config,
                               std::uint64_t seed, Provenance* provenance = nullptr);

struct FusionModel {
  std::vector<std::string> groups;
  EmbeddingStage embedding;
  SupervisedStage supervised;

  double predict_proba(const GroupFrames& frames) const;

  // Bundle directory: ddae.json, gmm.json, selection.json, classifier.json.
  void save(const std::filesystem::path& dir) const;
  static FusionModel load(const std::filesystem::path& dir);
};

FusionModel train_fusion(const std::vector<SessionFrames>& sessions, const std::map<std::string, int>& labels,
                         const FusionConfig& config);

// Builds every session's frames for a fold. Stages it fits (for example the
// motion classifier behind the fidget rows) must only use the given training
// participants and record themselves in the provenance.
using FrameProvider = std::function<std::vector<SessionFrames>(const std::vector<std::string>& train_participants,
                                                               Provenance& provenance)>;

struct FoldEmbeddings {
  std::vector<std::string> train_ids, test_ids;  // one per row of train_x / test_x
  Eigen::MatrixXd train_x, test_x;
  Provenance provenance;
  double ddae_initial_loss = 0.0, ddae_final_loss = 0.0;
};

struct FoldReport {
  std::vector<std::string> train_participants, test_participants;
  std::vector<int> truth, predicted;
  std::vector<double> scores;
  double f1 = 0.0, precision = 0.0, recall = 0.0, accuracy = 0.0;
  std::map<std::string, std::set<std::string>> provenance;
  bool leak_checked = false;
};

struct CvResult {
  std::vector<FoldReport> folds;
  double f1_mean = 0.0, f1_std = 0.0;
};

// Participant folds stratified by label.
std::vector<std::vector<std::string>> fusion_folds(const std::map<std::string, int>& labels,
                                                   const FusionConfig& config);

std::vector<FoldEmbeddings> embed_folds(const std::vector<std::vector<std::string>>& folds,
                                        const FrameProvider& provider, const FusionConfig& config);

// Fits selection and classifier on the fold's training rows, predicts the
// held-out rows and audits the provenance (LeakError on overlap).
FoldReport classify_fold(const FoldEmbeddings& fold, const std::map<std::string, int>& labels,
                         const FusionConfig& config, std::size_t fold_index);

CvResult summarize(std::vector<FoldReport> folds);

CvResult cross_validate(const std::map<std::string, int>& labels, const FrameProvider& provider,
                        const FusionConfig& config);

// Mean F1 over folds for each of `shuffles` random relabelings of the
// participants, reusing the fold embeddings (the embedding stages never see
// labels).
std::vector<double> permutation_f1(const std::vector<FoldEmbeddings>& folds, const std::map<std::string, int>& labels,
                                   const FusionConfig& config, int shuffles, std::uint64_t seed);

}  // namespace fidget
