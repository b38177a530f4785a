#pragma once

#include "fidget/pose.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fidget {

enum class Localization { kOverall, kHands, kHead, kLegs };

const char* localization_abbr(Localization loc);  // O, Hn, He, L
std::vector<int> localization_points(const KeypointSchema& schema, Localization loc);

// Per-frame mean keypoint displacement. Entry t-1 holds the movement between
// frames t-1 and t, so the series has N-1 entries.
struct MovementSeries {
  Localization localization = Localization::kOverall;
  std::vector<double> values;
};

struct GestureInterval {
  std::size_t start_window = 0;  // inclusive
  std::size_t end_window = 0;    // inclusive
  Localization localization = Localization::kOverall;

  bool operator==(const GestureInterval&) const = default;
};

MovementSeries frame_movement(const PoseSequence& seq, Localization loc);
MovementSeries frame_movement(const PoseSequence& seq, const std::vector<int>& points,
                              Localization loc = Localization::kOverall);

// Non-overlapping window means of length l; a trailing partial window is dropped.
std::vector<double> window_movement(const std::vector<double>& movement, std::size_t l = 10);

// Opens a gesture at the first window above threshold and closes it before
// the first run of n consecutive windows at or below threshold. A gesture
// still open at the end closes at its last above-threshold window.
std::vector<GestureInterval> detect_gestures(const std::vector<double>& windows, double threshold,
                                             std::size_t n = 3,
                                             Localization loc = Localization::kOverall);

// Fraction of gesture-free time divided by the number of gestures; 1.0 when
// no gesture occurred.
double gesture_surprise(double gesture_free_fraction, std::size_t gesture_count);

struct GestureConfig {
  std::size_t window_length = 10;       // l
  std::size_t close_windows = 3;        // n
  double threshold_percentile = 75.0;   // used when absolute_threshold is unset
  std::optional<double> absolute_threshold;
};

// Descriptor layout: O-{FM, GM, GS, GD, GN} then {GL, GA, GT, GS, GN} for
// Hn, He and L, in that order.
struct GestureFeatureVector {
  static constexpr std::size_t kSize = 20;
  std::array<double, kSize> values{};

  static const std::array<std::string, kSize>& names();
  double operator[](std::size_t i) const { return values[i]; }
  double get(const std::string& name) const;
};

struct GestureAnalysis {
  GestureFeatureVector features;
  std::array<std::vector<GestureInterval>, 3> gestures;  // Hn, He, L
  std::array<double, 3> thresholds{};
};

GestureAnalysis analyze_gestures(const PoseSequence& seq, const GestureConfig& config = {});
GestureFeatureVector body_gesture_features(const PoseSequence& seq, const GestureConfig& config = {});

}  // namespace fidget
