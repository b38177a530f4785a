#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace fidget {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// One 2-D keypoint. Missing detections carry non-finite coordinates.
struct Keypoint {
  double x = kNaN;
  double y = kNaN;
  double confidence = kNaN;  // NaN when the detector reported none

  bool missing() const {
    return !std::isfinite(x) || !std::isfinite(y) || confidence == 0.0;
  }
  Point2 point() const { return {x, y}; }
};

struct FramePose {
  int t = 0;
  std::vector<Keypoint> points;
};

// Named keypoint index groups. Joint-segment groups (forearm_left, ...) hold
// exactly two indices ordered proximal -> distal.
class KeypointSchema {
 public:
  static constexpr const char* kHandLeft = "hand_left";
  static constexpr const char* kHandRight = "hand_right";
  static constexpr const char* kFace = "face";
  static constexpr const char* kHead = "head";
  static constexpr const char* kForearmLeft = "forearm_left";
  static constexpr const char* kForearmRight = "forearm_right";
  static constexpr const char* kUpperArmLeft = "upper_arm_left";
  static constexpr const char* kUpperArmRight = "upper_arm_right";
  static constexpr const char* kUpperLegLeft = "upper_leg_left";
  static constexpr const char* kUpperLegRight = "upper_leg_right";
  static constexpr const char* kLowerLegLeft = "lower_leg_left";
  static constexpr const char* kLowerLegRight = "lower_leg_right";
  static constexpr const char* kNeck = "neck";
  static constexpr const char* kMidHip = "mid_hip";
  static constexpr const char* kLegs = "legs";

  KeypointSchema() = default;
  KeypointSchema(int num_keypoints, std::map<std::string, std::vector<int>> groups);

  static KeypointSchema from_json_file(const std::filesystem::path& path, int num_keypoints);
  static KeypointSchema from_json_text(const std::string& text, int num_keypoints);
  std::string to_json() const;

  int num_keypoints() const { return num_keypoints_; }
  bool has(const std::string& name) const { return groups_.count(name) != 0; }
  // Throws SchemaError for unknown names.
  const std::vector<int>& group(const std::string& name) const;
  const std::map<std::string, std::vector<int>>& groups() const { return groups_; }

  // All leg keypoints: the "legs" group if present, else the union of the
  // four leg segments.
  std::vector<int> leg_points() const;
  std::vector<int> hand_points() const;
  std::vector<int> all_points() const;

  // Re-checks indices against a keypoint count and the structural rules.
  void validate(int num_keypoints) const;

 private:
  int num_keypoints_ = 0;
  std::map<std::string, std::vector<int>> groups_;
};

struct PoseSequence {
  double fps = 0.0;
  std::vector<FramePose> frames;
  KeypointSchema schema;

  std::size_t size() const { return frames.size(); }
  int num_keypoints() const {
    return frames.empty() ? schema.num_keypoints()
                          : static_cast<int>(frames.front().points.size());
  }
  bool fully_observed() const;
};

// A dim x N matrix of per-video-frame values. NaN marks missing samples.
struct FeatureTrack {
  std::string name;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index length() const { return values.cols(); }
};

struct SpeakingTrack {
  std::vector<std::uint8_t> speaking;
};

// Standard dimensions of the sidecar groups.
inline constexpr int kAuDim = 35;
inline constexpr int kGazeDim = 8;
inline constexpr int kMfccDim = 13;
int expected_track_dim(const std::string& name);

}  // namespace fidget
