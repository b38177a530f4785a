#include "fidget/adaptors.hpp"

#include "fidget/errors.hpp"
#include "fidget/signal.hpp"
#include "fidget/text.hpp"

#include <cmath>
#include <stdexcept>

namespace fidget {

const char* to_string(LocationCode code) {
  switch (code) {
    case LocationCode::kH2H: return "H2H";
    case LocationCode::kH2A: return "H2A";
    case LocationCode::kH2L: return "H2L";
    case LocationCode::kH2F: return "H2F";
    case LocationCode::kHF: return "HF";
    case LocationCode::kL2G: return "L2G";
    case LocationCode::kL2L: return "L2L";
  }
  return "?";
}

LocationCode parse_location_code(const std::string& s) {
  static constexpr LocationCode kAll[] = {LocationCode::kH2H, LocationCode::kH2A, LocationCode::kH2L,
                                          LocationCode::kH2F, LocationCode::kHF,  LocationCode::kL2G,
                                          LocationCode::kL2L};
  for (auto c : kAll)
    if (s == to_string(c)) return c;
  throw ParseError("unknown location code '" + s + "'");
}

bool is_hand_code(LocationCode code) {
  return code != LocationCode::kL2G && code != LocationCode::kL2L;
}

namespace {

Point2 point_of(const FramePose& frame, int k) {
  const auto& p = frame.points.at(static_cast<std::size_t>(k));
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    throw DataError("limb_boxes: keypoint " + std::to_string(k) + " missing at frame " + std::to_string(frame.t));
  return p.point();
}

LimbBox group_box(const FramePose& frame, const std::vector<int>& idx) {
  std::vector<Point2> pts;
  pts.reserve(idx.size());
  for (int k : idx) pts.push_back(point_of(frame, k));
  return LimbBox::bounding(pts);
}

LimbBox segment_box(const FramePose& frame, const KeypointSchema& schema, const char* name, double width) {
  const auto& j = schema.group(name);
  return LimbBox::segment(point_of(frame, j[0]), point_of(frame, j[1]), width);
}

LocationCode hand_target(const LimbBox& hand, const FrameBoxes& b, bool left) {
  if (overlaps(hand, b.face)) return LocationCode::kH2F;
  const LimbBox& fore = left ? b.forearm_right : b.forearm_left;
  const LimbBox& upper = left ? b.upper_arm_right : b.upper_arm_left;
  if (overlaps(hand, fore) || overlaps(hand, upper)) return LocationCode::kH2A;
  if (overlaps(hand, b.upper_leg_left) || overlaps(hand, b.upper_leg_right) ||
      overlaps(hand, b.lower_leg_left) || overlaps(hand, b.lower_leg_right))
    return LocationCode::kH2L;
  return LocationCode::kHF;
}

}  // namespace

FrameBoxes limb_boxes(const FramePose& frame, const KeypointSchema& schema, const LimbWidths& widths) {
  FrameBoxes b;
  b.hand_left = group_box(frame, schema.group(KeypointSchema::kHandLeft));
  b.hand_right = group_box(frame, schema.group(KeypointSchema::kHandRight));
  b.face = group_box(frame, schema.group(KeypointSchema::kFace));
  b.forearm_left = segment_box(frame, schema, KeypointSchema::kForearmLeft, widths.arm);
  b.forearm_right = segment_box(frame, schema, KeypointSchema::kForearmRight, widths.arm);
  b.upper_arm_left = segment_box(frame, schema, KeypointSchema::kUpperArmLeft, widths.arm);
  b.upper_arm_right = segment_box(frame, schema, KeypointSchema::kUpperArmRight, widths.arm);
  b.upper_leg_left = segment_box(frame, schema, KeypointSchema::kUpperLegLeft, widths.leg);
  b.upper_leg_right = segment_box(frame, schema, KeypointSchema::kUpperLegRight, widths.leg);
  b.lower_leg_left = segment_box(frame, schema, KeypointSchema::kLowerLegLeft, widths.leg);
  b.lower_leg_right = segment_box(frame, schema, KeypointSchema::kLowerLegRight, widths.leg);
  return b;
}

LimbWidths resolve_widths(const PoseSequence& seq, const AdaptorConfig& config) {
  LimbWidths w;
  double diag = 0.0;
  if (!config.arm_width || !config.leg_width) {
    std::vector<double> d;
    d.reserve(seq.size());
    const auto& hl = seq.schema.group(KeypointSchema::kHandLeft);
    const auto& hr = seq.schema.group(KeypointSchema::kHandRight);
    for (const auto& f : seq.frames)
      d.push_back(0.5 * (group_box(f, hl).diagonal() + group_box(f, hr).diagonal()));
    if (d.empty()) throw DataError("cannot derive limb widths from an empty sequence");
    diag = median(std::move(d));
    if (!(diag > 0.0)) throw DataError("hand boxes are degenerate; configure limb widths explicitly");
  }
  w.arm = config.arm_width ? *config.arm_width : config.arm_width_factor * diag;
  w.leg = config.leg_width ? *config.leg_width : config.leg_width_factor * diag;
  return w;
}

int min_duration_frames(double fps, const AdaptorConfig& config) {
  return static_cast<int>(std::lround(config.min_duration * fps / config.reference_fps));
}

LocationTimeline raw_locations(const PoseSequence& seq, const LimbWidths& widths) {
  LocationTimeline tl;
  const std::size_t n = seq.size();
  tl.left_hand.resize(n);
  tl.right_hand.resize(n);
  tl.legs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FrameBoxes b = limb_boxes(seq.frames[i], seq.schema, widths);
    if (overlaps(b.hand_left, b.hand_right)) {
      tl.left_hand[i] = tl.right_hand[i] = LocationCode::kH2H;
    } else {
      tl.left_hand[i] = hand_target(b.hand_left, b, true);
      tl.right_hand[i] = hand_target(b.hand_right, b, false);
    }
    const bool crossed = overlaps(b.upper_leg_left, b.upper_leg_right) ||
                         overlaps(b.upper_leg_left, b.lower_leg_right) ||
                         overlaps(b.lower_leg_left, b.upper_leg_right) ||
                         overlaps(b.lower_leg_left, b.lower_leg_right);
    tl.legs[i] = crossed ? LocationCode::kL2L : LocationCode::kL2G;
  }
  return tl;
}

void filter_short_runs(std::vector<LocationCode>& channel, int min_duration) {
  std::size_t i = 0;
  while (i < channel.size()) {
    std::size_t j = i;
    while (j < channel.size() && channel[j] == channel[i]) ++j;
    const auto code = channel[i];
    if (code != LocationCode::kHF && code != LocationCode::kH2F &&
        static_cast<long>(j - i) < static_cast<long>(min_duration)) {
      for (std::size_t k = i; k < j; ++k) channel[k] = LocationCode::kHF;
    }
    i = j;
  }
}

LocationTimeline detect_locations(const PoseSequence& seq, const AdaptorConfig& config) {
  LocationTimeline tl = raw_locations(seq, resolve_widths(seq, config));
  const int min_len = min_duration_frames(seq.fps, config);
  filter_short_runs(tl.left_hand, min_len);
  filter_short_runs(tl.right_hand, min_len);
  return tl;
}

std::string format_timeline_csv(const LocationTimeline& timeline) {
  std::string out = "frame,left_code,right_code,leg_code\n";
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    out += std::to_string(i) + ',' + to_string(timeline.left_hand[i]) + ',' +
           to_string(timeline.right_hand[i]) + ',' + to_string(timeline.legs[i]) + '\n';
  }
  return out;
}

LocationTimeline parse_timeline_csv(const std::string& text, const std::string& source) {
  LocationTimeline tl;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty() || line_no == 1) continue;
    auto cells = split(line, ',');
    if (cells.size() != 4) throw ParseError(source + " line " + std::to_string(line_no) + ": expected 4 fields");
    tl.left_hand.push_back(parse_location_code(std::string(trim(cells[1]))));
    tl.right_hand.push_back(parse_location_code(std::string(trim(cells[2]))));
    tl.legs.push_back(parse_location_code(std::string(trim(cells[3]))));
  }
  return tl;
}

}  // namespace fidget
