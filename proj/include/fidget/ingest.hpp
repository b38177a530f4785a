#pragma once

#include "fidget/pose.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fidget {

struct DiarizationInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string speaker;
};

struct SidecarPaths {
  std::optional<std::filesystem::path> aus;
  std::optional<std::filesystem::path> gaze;
  std::optional<std::filesystem::path> mfcc;
  std::optional<std::filesystem::path> diarization;
  std::string participant_speaker;  // speaker_id of the participant in the diarization
};

struct Session {
  PoseSequence pose;
  std::vector<FeatureTrack> tracks;  // aligned to pose frames
  SpeakingTrack speaking;

  const FeatureTrack* track(const std::string& name) const;
};

// Pose file: one JSON object per line {"t": int, "points": [[x, y, c], ...]}.
// A top-level JSON array of the same objects is also accepted. Null
// coordinates and confidence 0 mark missing detections.
PoseSequence parse_pose(const std::string& text, double fps, const KeypointSchema& schema,
                        const std::string& source = "pose");
PoseSequence load_pose(const std::filesystem::path& path, double fps, const KeypointSchema& schema);
std::string format_pose(const PoseSequence& seq);

// Sidecar CSV: header row, first column timestamp in seconds.
struct TimedTable {
  std::vector<std::string> columns;  // without the timestamp column
  std::vector<double> timestamps;
  std::vector<std::vector<double>> rows;  // NaN for empty / "nan" cells
};
TimedTable parse_timed_csv(const std::string& text, const std::string& source = "track");
TimedTable load_timed_csv(const std::filesystem::path& path);
std::string format_timed_csv(const TimedTable& table);

// Each video frame i (time i / fps) takes the sample with the nearest
// timestamp; ties go to the earlier sample.
FeatureTrack resample_nearest(const TimedTable& table, const std::string& name,
                              std::size_t n_frames, double fps);

std::vector<DiarizationInterval> parse_diarization(const std::string& text,
                                                   const std::string& source = "diarization");
std::vector<DiarizationInterval> load_diarization(const std::filesystem::path& path);
std::string format_diarization(const std::vector<DiarizationInterval>& intervals);

// Frame i is speaking iff i / fps lies in [start, end) of an interval
// attributed to the participant.
SpeakingTrack speaking_from_intervals(const std::vector<DiarizationInterval>& intervals,
                                      const std::string& participant, std::size_t n_frames,
                                      double fps);

Session load_session(const std::filesystem::path& pose_path, const SidecarPaths& sidecars,
                     const KeypointSchema& schema, double fps);

// Fills missing coordinates. Keypoints observed at least 4 times use a
// not-a-knot cubic spline across the sequence, with constant extrapolation
// beyond the first/last observation. Sparser keypoints follow the centroid
// of their localization group (warning logged). Observed samples pass
// through bit-exact.
PoseSequence interpolate_missing(const PoseSequence& seq);

// Savitzky-Golay smoothing of every coordinate trajectory. Throws DataError
// when the sequence is shorter than the window.
PoseSequence smooth(const PoseSequence& seq, int window = 11, int polyorder = 3);

// Divides coordinates by the session-median neck -> mid-hip distance.
PoseSequence normalize_scale(const PoseSequence& seq);
double torso_length(const PoseSequence& seq);

// interpolate_missing -> smooth (skipped with a warning for short
// sequences) -> normalize_scale.
PoseSequence preprocess(const PoseSequence& seq, int window = 11, int polyorder = 3);

// Linear interpolation of NaN gaps in each track row; constant at the ends,
// zero for an all-missing row (warning logged).
FeatureTrack fill_track_gaps(const FeatureTrack& track);

}  // namespace fidget
