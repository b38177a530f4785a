#include "fidget/gestures.hpp"

#include "fidget/errors.hpp"
#include "fidget/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fidget {

const char* localization_abbr(Localization loc) {
  switch (loc) {
    case Localization::kOverall: return "O";
    case Localization::kHands: return "Hn";
    case Localization::kHead: return "He";
    case Localization::kLegs: return "L";
  }
  return "?";
}

std::vector<int> localization_points(const KeypointSchema& schema, Localization loc) {
  switch (loc) {
    case Localization::kOverall: return schema.all_points();
    case Localization::kHands: return schema.hand_points();
    case Localization::kHead:
      return schema.has(KeypointSchema::kHead) ? schema.group(KeypointSchema::kHead)
                                               : schema.group(KeypointSchema::kFace);
    case Localization::kLegs: return schema.leg_points();
  }
  return {};
}

MovementSeries frame_movement(const PoseSequence& seq, const std::vector<int>& points, Localization loc) {
  if (points.empty()) throw std::invalid_argument("frame_movement: empty localization group");
  MovementSeries out;
  out.localization = loc;
  if (seq.size() < 2) return out;
  out.values.resize(seq.size() - 1);
  const double inv = 1.0 / static_cast<double>(points.size());
  for (std::size_t t = 1; t < seq.size(); ++t) {
    const auto& prev = seq.frames[t - 1].points;
    const auto& cur = seq.frames[t].points;
    double acc = 0.0;
    for (int p : points) {
      const auto pu = static_cast<std::size_t>(p);
      acc += std::hypot(cur[pu].x - prev[pu].x, cur[pu].y - prev[pu].y);
    }
    out.values[t - 1] = acc * inv;
  }
  return out;
}

MovementSeries frame_movement(const PoseSequence& seq, Localization loc) {
  return frame_movement(seq, localization_points(seq.schema, loc), loc);
}

std::vector<double> window_movement(const std::vector<double>& movement, std::size_t l) {
  if (l == 0) throw std::invalid_argument("window_movement: window length must be positive");
  const std::size_t count = movement.size() / l;
  std::vector<double> w(count);
  for (std::size_t i = 0; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t t = i * l; t < (i + 1) * l; ++t) acc += movement[t];
    w[i] = acc / static_cast<double>(l);
  }
  return w;
}

std::vector<GestureInterval> detect_gestures(const std::vector<double>& windows, double threshold,
                                             std::size_t n, Localization loc) {
  if (!(threshold > 0.0)) throw std::invalid_argument("detect_gestures: threshold must be positive");
  if (n == 0) throw std::invalid_argument("detect_gestures: n must be positive");
  std::vector<GestureInterval> out;
  bool open = false;
  std::size_t start = 0, last_active = 0, quiet = 0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const bool active = windows[i] > threshold;
    if (!open) {
      if (active) {
        open = true;
        start = last_active = i;
        quiet = 0;
      }
      continue;
    }
    if (active) {
      last_active = i;
      quiet = 0;
    } else if (++quiet == n) {
      out.push_back({start, last_active, loc});
      open = false;
    }
  }
  if (open) out.push_back({start, last_active, loc});
  return out;
}

double gesture_surprise(double gesture_free_fraction, std::size_t gesture_count) {
  if (gesture_count == 0) return 1.0;
  return gesture_free_fraction / static_cast<double>(gesture_count);
}

const std::array<std::string, GestureFeatureVector::kSize>& GestureFeatureVector::names() {
  static const std::array<std::string, kSize> kNames = {
      "O-FM",  "O-GM",  "O-GS",  "O-GD",  "O-GN",  "Hn-GL", "Hn-GA", "Hn-GT", "Hn-GS", "Hn-GN",
      "He-GL", "He-GA", "He-GT", "He-GS", "He-GN", "L-GL",  "L-GA",  "L-GT",  "L-GS",  "L-GN"};
  return kNames;
}

double GestureFeatureVector::get(const std::string& name) const {
  const auto& n = names();
  auto it = std::find(n.begin(), n.end(), name);
  if (it == n.end()) throw std::out_of_range("unknown gesture feature " + name);
  return values[static_cast<std::size_t>(it - n.begin())];
}

GestureAnalysis analyze_gestures(const PoseSequence& seq, const GestureConfig& config) {
  GestureAnalysis result;
  const auto overall = frame_movement(seq, Localization::kOverall).values;
  const std::size_t m = overall.size();
  auto& fv = result.features.values;
  if (m == 0) {
    // Single-frame session: no movement, no gestures.
    fv.fill(0.0);
    fv[2] = 1.0;
    for (std::size_t li = 0; li < 3; ++li) fv[5 + 5 * li + 3] = 1.0;
    return result;
  }
  const double md = static_cast<double>(m);
  const std::size_t l = config.window_length;

  std::vector<std::uint8_t> any_gesture(m, 0);
  std::size_t total_gestures = 0;
  double sum_gesture_std = 0.0;
  double localized_gn_sum = 0.0;

  static constexpr Localization kLocs[] = {Localization::kHands, Localization::kHead, Localization::kLegs};
  for (std::size_t li = 0; li < 3; ++li) {
    const auto f = frame_movement(seq, kLocs[li]).values;
    const auto w = window_movement(f, l);
    double threshold = 0.0;
    if (config.absolute_threshold) {
      threshold = *config.absolute_threshold;
    } else if (!w.empty()) {
      threshold = percentile(w, config.threshold_percentile);
    }
    threshold = std::max(threshold, 1e-12);
    result.thresholds[li] = threshold;
    const auto gestures = detect_gestures(w, threshold, config.close_windows, kLocs[li]);
    result.gestures[li] = gestures;

    std::vector<std::uint8_t> in_gesture(m, 0);
    double gesture_entries = 0.0, gesture_movement = 0.0, length_sum = 0.0;
    for (const auto& g : gestures) {
      const std::size_t a = g.start_window * l;
      const std::size_t b = std::min(m, (g.end_window + 1) * l);
      std::vector<double> seg(f.begin() + static_cast<long>(a), f.begin() + static_cast<long>(b));
      sum_gesture_std += stddev(seg);
      length_sum += static_cast<double>(b - a);
      for (std::size_t t = a; t < b; ++t) {
        in_gesture[t] = 1;
        any_gesture[t] = 1;
        gesture_entries += 1.0;
        gesture_movement += f[t];
      }
    }
    const std::size_t count = gestures.size();
    total_gestures += count;
    const double free_fraction = 1.0 - gesture_entries / md;
    double* out = &fv[5 + 5 * li];
    out[0] = count ? (length_sum / static_cast<double>(count)) / md : 0.0;  // GL
    out[1] = gesture_entries > 0 ? gesture_movement / gesture_entries : 0.0;  // GA
    out[2] = gesture_movement / md;                                           // GT
    out[3] = gesture_surprise(free_fraction, count);                          // GS
    out[4] = static_cast<double>(count) / md;                                 // GN
    localized_gn_sum += out[4];
  }

  double total_movement = 0.0, gesture_movement = 0.0, free_entries = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    total_movement += overall[t];
    if (any_gesture[t]) {
      gesture_movement += overall[t];
    } else {
      free_entries += 1.0;
    }
  }
  fv[0] = total_movement / md;                                                // FM
  fv[1] = total_movement > 0.0 ? gesture_movement / total_movement : 0.0;     // GM
  fv[2] = gesture_surprise(free_entries / md, total_gestures);                // GS
  fv[3] = total_gestures ? sum_gesture_std / static_cast<double>(total_gestures) : 0.0;  // GD
  fv[4] = localized_gn_sum;                                                   // GN
  return result;
}

GestureFeatureVector body_gesture_features(const PoseSequence& seq, const GestureConfig& config) {
  return analyze_gestures(seq, config).features;
}

}  // namespace fidget
