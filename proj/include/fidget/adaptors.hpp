#pragma once

#include "fidget/geometry.hpp"
#include "fidget/pose.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fidget {

// Self-adaptor location codes. HF is "hand free".
enum class LocationCode : std::uint8_t { kH2H, kH2A, kH2L, kH2F, kHF, kL2G, kL2L };

const char* to_string(LocationCode code);
LocationCode parse_location_code(const std::string& s);
bool is_hand_code(LocationCode code);

struct LimbWidths {
  double arm = 0.0;  // forearm and upper arm
  double leg = 0.0;  // upper and lower leg
};

struct FrameBoxes {
  LimbBox hand_left, hand_right, face;
  LimbBox forearm_left, forearm_right, upper_arm_left, upper_arm_right;
  LimbBox upper_leg_left, upper_leg_right, lower_leg_left, lower_leg_right;
};

FrameBoxes limb_boxes(const FramePose& frame, const KeypointSchema& schema, const LimbWidths& widths);

struct LocationTimeline {
  std::vector<LocationCode> left_hand;
  std::vector<LocationCode> right_hand;
  std::vector<LocationCode> legs;

  std::size_t size() const { return legs.size(); }
  bool operator==(const LocationTimeline&) const = default;
};

struct AdaptorConfig {
  std::optional<double> arm_width;  // absolute, normalized units
  std::optional<double> leg_width;
  double arm_width_factor = 0.5;    // x median hand-box diagonal
  double leg_width_factor = 1.0;
  int min_duration = 100;           // frames at reference_fps
  double reference_fps = 26.0;
};

// Widths resolved from the config: absolute values win, otherwise factors of
// the session-median hand-box diagonal.
LimbWidths resolve_widths(const PoseSequence& seq, const AdaptorConfig& config);
int min_duration_frames(double fps, const AdaptorConfig& config);

// Per-frame codes before duration filtering. H2H is checked first; each
// remaining hand takes the first overlapping target in the order face,
// contralateral arm, leg, else HF. Legs are L2L when the left and right leg
// boxes overlap, else L2G.
LocationTimeline raw_locations(const PoseSequence& seq, const LimbWidths& widths);

// Relabels hand runs shorter than min_duration to HF; H2F runs are kept.
void filter_short_runs(std::vector<LocationCode>& channel, int min_duration);

LocationTimeline detect_locations(const PoseSequence& seq, const AdaptorConfig& config = {});

std::string format_timeline_csv(const LocationTimeline& timeline);
LocationTimeline parse_timeline_csv(const std::string& text, const std::string& source = "timeline");

}  // namespace fidget
