#pragma once

#include "fidget/adaptors.hpp"
#include "fidget/ingest.hpp"
#include "fidget/pose.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fidget {

// 25 body keypoints (OpenPose BODY_25 order) followed by five keypoints per
// hand: 25-29 left, 30-34 right.
KeypointSchema synthetic_schema();

enum class Hand { kLeft, kRight };

struct ScriptEvent {
  LocationCode type = LocationCode::kHF;
  std::optional<Hand> hand;  // required for single-hand codes
  int start = 0;             // first frame
  int end = 0;               // one past the last frame
  bool oscillate = false;
  double freq_hz = 1.0;
  double amplitude = 0.05;   // torso units
};

struct Script {
  std::string participant = "P01";
  std::uint64_t seed = 0;
  double fps = 26.0;
  int frames = 2080;
  double scale_px = 180.0;  // pixels per torso unit
  double origin_x = 640.0, origin_y = 150.0;
  double jitter = 0.005;    // torso units
  double missing_rate = 0.0;
  std::vector<ScriptEvent> events;
  std::vector<std::pair<double, double>> speaking;  // participant turns, seconds
  std::map<std::string, double> sidecar_shift;      // AUs / Gaze / MFCCs mean offset
  std::map<std::string, double> sidecar_scale;      // noise standard deviation, default 1
  double participant_spread = 0.05;                 // sd of per-participant sidecar offsets
  double phq8 = 0.0, gad7 = 0.0;
};

// Throws DataError for overlapping events on a channel, out-of-range frames,
// missing hands or an oscillation outside 0.5-2.5 Hz.
void validate_script(const Script& script);
Script parse_script(const std::string& json_text, const std::string& source = "script");
std::string format_script(const Script& script);

// Per-frame ground truth: location codes and whether each channel moves.
struct GroundTruth {
  LocationTimeline timeline;
  std::vector<std::uint8_t> left_dynamic, right_dynamic, leg_dynamic;

  bool operator==(const GroundTruth&) const = default;
};
std::string format_truth_csv(const GroundTruth& truth);
GroundTruth parse_truth_csv(const std::string& text, const std::string& source = "truth");

inline const std::string kParticipantSpeaker = "participant";
inline const std::string kInterviewerSpeaker = "interviewer";

struct SyntheticSession {
  Script script;
  PoseSequence pose;
  TimedTable aus, gaze, mfcc;  // AUs and gaze at video rate, MFCCs at 100 Hz
  std::vector<DiarizationInterval> diarization;
  GroundTruth truth;
};

SyntheticSession generate(const Script& script);

// pose.jsonl, aus.csv, gaze.csv, mfcc.csv, diarization.csv, truth.csv and
// script.json inside `dir`.
void write_session(const SyntheticSession& session, const std::filesystem::path& dir);

struct CohortRates {
  double hand_dynamic = 0.0;  // probability that a hand event oscillates
  double leg_dynamic = 0.0;   // probability that a leg event oscillates
  double sidecar_shift = 0.0;
  double sidecar_scale = 1.0;
};

struct BenchmarkConfig {
  int participants = 12;
  std::uint64_t seed = 0;
  double fps = 26.0;
  double duration_s = 80.0;
  CohortRates high{0.6, 0.7, 0.25, 1.2};
  CohortRates low{0.15, 0.1, 0.0, 1.0};
};

// Script of one benchmark participant. Even-indexed participants belong to
// the high-score cohort.
Script benchmark_script(const BenchmarkConfig& config, int index);

// Writes corpus.json, schema.json, labels.csv and sessions/<id>/. Throws
// ConfigError for fewer than 6 participants.
void make_benchmark(const BenchmarkConfig& config, const std::filesystem::path& dir);

}  // namespace fidget
