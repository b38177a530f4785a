#include "fidget/synth.hpp"

#include "fidget/distress.hpp"
#include "fidget/errors.hpp"
#include "fidget/random.hpp"
#include "fidget/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fidget {

namespace {

// BODY_25 indices used below.
enum Body : int {
  kNose = 0, kNeckIdx = 1, kRShoulder = 2, kRElbow = 3, kRWrist = 4, kLShoulder = 5, kLElbow = 6,
  kLWrist = 7, kMidHipIdx = 8, kRHip = 9, kRKnee = 10, kRAnkle = 11, kLHip = 12, kLKnee = 13,
  kLAnkle = 14, kREye = 15, kLEye = 16, kREar = 17, kLEar = 18, kLBigToe = 19, kLSmallToe = 20,
  kLHeel = 21, kRBigToe = 22, kRSmallToe = 23, kRHeel = 24, kLeftHand = 25, kRightHand = 30,
  kPointCount = 35,
};

const char* hand_name(Hand h) { return h == Hand::kLeft ? "left" : "right"; }

double quantize(double v, double step) { return std::round(v / step) * step; }

}  // namespace

KeypointSchema synthetic_schema() {
  std::map<std::string, std::vector<int>> g;
  g[KeypointSchema::kHandLeft] = {25, 26, 27, 28, 29};
  g[KeypointSchema::kHandRight] = {30, 31, 32, 33, 34};
  g[KeypointSchema::kFace] = {kNose, kREye, kLEye, kREar, kLEar};
  g[KeypointSchema::kHead] = {kNose, kREye, kLEye, kREar, kLEar};
  g[KeypointSchema::kForearmLeft] = {kLElbow, kLWrist};
  g[KeypointSchema::kForearmRight] = {kRElbow, kRWrist};
  g[KeypointSchema::kUpperArmLeft] = {kLShoulder, kLElbow};
  g[KeypointSchema::kUpperArmRight] = {kRShoulder, kRElbow};
  g[KeypointSchema::kUpperLegLeft] = {kLHip, kLKnee};
  g[KeypointSchema::kUpperLegRight] = {kRHip, kRKnee};
  g[KeypointSchema::kLowerLegLeft] = {kLKnee, kLAnkle};
  g[KeypointSchema::kLowerLegRight] = {kRKnee, kRAnkle};
  g[KeypointSchema::kLegs] = {kRHip, kRKnee, kRAnkle, kLHip, kLKnee, kLAnkle,
                              kLBigToe, kLSmallToe, kLHeel, kRBigToe, kRSmallToe, kRHeel};
  g[KeypointSchema::kNeck] = {kNeckIdx};
  g[KeypointSchema::kMidHip] = {kMidHipIdx};
  return KeypointSchema(kPointCount, std::move(g));
}

void validate_script(const Script& s) {
  if (!(s.fps > 0.0)) throw DataError("script: fps must be positive");
  if (s.frames <= 0) throw DataError("script: frames must be positive");
  if (!(s.scale_px > 0.0)) throw DataError("script: scale_px must be positive");
  if (s.jitter < 0.0 || s.missing_rate < 0.0 || s.missing_rate >= 1.0)
    throw DataError("script: jitter and missing_rate must be non-negative (missing_rate < 1)");
  if (s.participant_spread < 0.0) throw DataError("script: participant_spread must be non-negative");
  for (const auto& [group, scale] : s.sidecar_scale)
    if (!(scale > 0.0)) throw DataError("script: sidecar_scale of " + group + " must be positive");
  // channel occupancy: 0 left hand, 1 right hand, 2 legs
  std::vector<std::vector<int>> owner(3, std::vector<int>(static_cast<std::size_t>(s.frames), -1));
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    const std::string where = "script event " + std::to_string(i) + " (" + to_string(e.type) + ")";
    if (e.start < 0 || e.end > s.frames || e.start >= e.end)
      throw DataError(where + ": frames [" + std::to_string(e.start) + ", " + std::to_string(e.end) +
                      ") outside the session");
    if (e.oscillate && (e.freq_hz < 0.5 || e.freq_hz > 2.5))
      throw DataError(where + ": oscillation frequency must lie in [0.5, 2.5] Hz");
    if (e.oscillate && !(e.amplitude > 0.0)) throw DataError(where + ": amplitude must be positive");
    std::vector<int> channels;
    if (e.type == LocationCode::kH2H) {
      channels = {0, 1};
    } else if (is_hand_code(e.type)) {
      if (!e.hand) throw DataError(where + ": hand events need \"hand\"");
      channels = {*e.hand == Hand::kLeft ? 0 : 1};
    } else {
      channels = {2};
    }
    for (int c : channels) {
      for (int t = e.start; t < e.end; ++t) {
        auto& o = owner[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
        if (o >= 0) {
          throw DataError(where + " overlaps event " + std::to_string(o) + " at frame " + std::to_string(t));
        }
        o = static_cast<int>(i);
      }
    }
  }
  for (int t = 0; t < s.frames; ++t) {
    const int l = owner[0][static_cast<std::size_t>(t)], r = owner[1][static_cast<std::size_t>(t)];
    if (l >= 0 && r >= 0 && l != r && s.events[static_cast<std::size_t>(l)].type == LocationCode::kH2A &&
        s.events[static_cast<std::size_t>(r)].type == LocationCode::kH2A)
      throw DataError("script: both hands cannot hold H2A at frame " + std::to_string(t));
  }
  for (const auto& [a, b] : s.speaking)
    if (!(b > a) || a < 0.0) throw DataError("script: speaking intervals need 0 <= start < end");
}

Script parse_script(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  Script s;
  const auto field = [&source](const char* name) { return source + ": field '" + name + "'"; };
  try {
    if (!j.is_object()) throw ParseError(source + ": top level must be an object");
    static const std::vector<std::string> kKeys = {"participant", "seed", "fps", "frames", "duration_s",
                                                   "scale_px", "origin", "jitter", "missing_rate", "events",
                                                   "speaking", "sidecar_shift", "sidecar_scale",
                                                   "participant_spread", "phq8", "gad7"};
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::find(kKeys.begin(), kKeys.end(), it.key()) == kKeys.end())
        throw ParseError(source + ": unknown field '" + it.key() + "'");
    s.participant = j.value("participant", s.participant);
    s.seed = j.value("seed", s.seed);
    s.fps = j.value("fps", s.fps);
    if (j.contains("frames")) {
      s.frames = j.at("frames").get<int>();
    } else if (j.contains("duration_s")) {
      s.frames = static_cast<int>(std::lround(j.at("duration_s").get<double>() * s.fps));
    }
    s.scale_px = j.value("scale_px", s.scale_px);
    if (j.contains("origin")) {
      const auto o = j.at("origin").get<std::vector<double>>();
      if (o.size() != 2) throw ParseError(field("origin") + " must be [x, y]");
      s.origin_x = o[0];
      s.origin_y = o[1];
    }
    s.jitter = j.value("jitter", s.jitter);
    s.missing_rate = j.value("missing_rate", s.missing_rate);
    s.phq8 = j.value("phq8", s.phq8);
    s.gad7 = j.value("gad7", s.gad7);
    if (j.contains("sidecar_shift")) s.sidecar_shift = j.at("sidecar_shift").get<std::map<std::string, double>>();
    if (j.contains("sidecar_scale")) s.sidecar_scale = j.at("sidecar_scale").get<std::map<std::string, double>>();
    s.participant_spread = j.value("participant_spread", s.participant_spread);
    if (j.contains("speaking"))
      for (const auto& iv : j.at("speaking")) {
        const auto v = iv.get<std::vector<double>>();
        if (v.size() != 2) throw ParseError(field("speaking") + " entries must be [start_s, end_s]");
        s.speaking.emplace_back(v[0], v[1]);
      }
    if (j.contains("events")) {
      std::size_t i = 0;
      for (const auto& ej : j.at("events")) {
        ScriptEvent e;
        const std::string where = source + ": events[" + std::to_string(i++) + "]";
        try {
          e.type = parse_location_code(ej.at("type").get<std::string>());
        } catch (const ParseError& err) {
          throw ParseError(where + ": " + err.what());
        }
        if (ej.contains("hand")) {
          const auto h = ej.at("hand").get<std::string>();
          if (h == "left") e.hand = Hand::kLeft;
          else if (h == "right") e.hand = Hand::kRight;
          else throw ParseError(where + ": field 'hand' must be left or right");
        }
        e.start = ej.at("start").get<int>();
        e.end = ej.at("end").get<int>();
        const auto motion = ej.value("motion", std::string("still"));
        if (motion != "still" && motion != "oscillate")
          throw ParseError(where + ": field 'motion' must be still or oscillate");
        e.oscillate = motion == "oscillate";
        e.freq_hz = ej.value("freq", e.freq_hz);
        e.amplitude = ej.value("amplitude", e.amplitude);
        s.events.push_back(e);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  validate_script(s);
  return s;
}

std::string format_script(const Script& s) {
  nlohmann::ordered_json j;
  j["participant"] = s.participant;
  j["seed"] = s.seed;
  j["fps"] = s.fps;
  j["frames"] = s.frames;
  j["scale_px"] = s.scale_px;
  j["origin"] = {s.origin_x, s.origin_y};
  j["jitter"] = s.jitter;
  j["missing_rate"] = s.missing_rate;
  j["phq8"] = s.phq8;
  j["gad7"] = s.gad7;
  j["sidecar_shift"] = s.sidecar_shift;
  j["sidecar_scale"] = s.sidecar_scale;
  j["participant_spread"] = s.participant_spread;
  j["speaking"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : s.speaking) j["speaking"].push_back({a, b});
  j["events"] = nlohmann::ordered_json::array();
  for (const auto& e : s.events) {
    nlohmann::ordered_json ej;
    ej["type"] = to_string(e.type);
    if (e.hand) ej["hand"] = hand_name(*e.hand);
    ej["start"] = e.start;
    ej["end"] = e.end;
    ej["motion"] = e.oscillate ? "oscillate" : "still";
    if (e.oscillate) {
      ej["freq"] = e.freq_hz;
      ej["amplitude"] = e.amplitude;
    }
    j["events"].push_back(std::move(ej));
  }
  return j.dump(2) + "\n";
}

std::string format_truth_csv(const GroundTruth& g) {
  std::ostringstream out;
  out << "frame,left_code,right_code,leg_code,left_dynamic,right_dynamic,leg_dynamic\n";
  for (std::size_t t = 0; t < g.timeline.size(); ++t) {
    out << t << ',' << to_string(g.timeline.left_hand[t]) << ',' << to_string(g.timeline.right_hand[t]) << ','
        << to_string(g.timeline.legs[t]) << ',' << int{g.left_dynamic[t]} << ',' << int{g.right_dynamic[t]} << ','
        << int{g.leg_dynamic[t]} << '\n';
  }
  return out.str();
}

GroundTruth parse_truth_csv(const std::string& text, const std::string& source) {
  GroundTruth g;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty() || line_no == 1) continue;
    const auto cells = split(line, ',');
    const std::string where = source + " line " + std::to_string(line_no);
    if (cells.size() != 7) throw ParseError(where + ": expected 7 fields");
    try {
      g.timeline.left_hand.push_back(parse_location_code(std::string(trim(cells[1]))));
      g.timeline.right_hand.push_back(parse_location_code(std::string(trim(cells[2]))));
      g.timeline.legs.push_back(parse_location_code(std::string(trim(cells[3]))));
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    const auto flag = [&where](std::string_view v, const char* name) -> std::uint8_t {
      v = trim(v);
      if (v == "0") return 0;
      if (v == "1") return 1;
      throw ParseError(where + ": field '" + name + "' must be 0 or 1");
    };
    g.left_dynamic.push_back(flag(cells[4], "left_dynamic"));
    g.right_dynamic.push_back(flag(cells[5], "right_dynamic"));
    g.leg_dynamic.push_back(flag(cells[6], "leg_dynamic"));
  }
  return g;
}

namespace {

struct Vec {
  double x = 0.0, y = 0.0;
};
Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }
Vec unit(Vec a) {
  const double n = std::hypot(a.x, a.y);
  return n > 0.0 ? Vec{a.x / n, a.y / n} : Vec{0.0, -1.0};
}

struct LegPose {
  Vec hip[2], knee[2], ankle[2];  // [0] left, [1] right
};

LegPose leg_pose(bool crossed) {
  LegPose p;
  p.hip[0] = {0.15, 1.0};
  p.hip[1] = {-0.15, 1.0};
  p.knee[0] = crossed ? Vec{-0.05, 1.3} : Vec{0.25, 1.3};
  p.knee[1] = {-0.25, 1.3};
  p.ankle[0] = crossed ? Vec{-0.3, 1.9} : Vec{0.25, 2.0};
  p.ankle[1] = {-0.25, 2.0};
  return p;
}

struct ArmPose {
  Vec center, elbow;
};

Vec wrist_of(const ArmPose& a) { return a.center + 0.1 * unit(a.elbow - a.center); }

// Resting arm geometry for a code; `other` is the contralateral arm (H2A).
ArmPose arm_pose(int side, LocationCode code, const LegPose& legs, const ArmPose* other) {
  const double s = side == 0 ? 1.0 : -1.0;  // left hand on +x
  switch (code) {
    case LocationCode::kH2H: return {{s * 0.03, 0.8}, {s * 0.35, 0.55}};
    case LocationCode::kH2L: {
      const Vec thigh = 0.5 * (legs.hip[side] + legs.knee[side]);
      return {thigh + Vec{s * 0.02, 0.0}, {s * 0.45, 0.6}};
    }
    case LocationCode::kH2F: return {{s * 0.1, -0.38}, {s * 0.4, 0.2}};
    case LocationCode::kH2A: {
      const Vec target = 0.5 * (other->elbow + wrist_of(*other));
      return {target, {-s * 0.1, 0.45}};
    }
    default: return {{s * 0.65, 1.0}, {s * 0.5, 0.5}};
  }
}

}  // namespace

SyntheticSession generate(const Script& script) {
  validate_script(script);
  SyntheticSession out;
  out.script = script;
  const auto n = static_cast<std::size_t>(script.frames);
  const double fps = script.fps;

  // Channel state per frame.
  std::vector<const ScriptEvent*> ev[3];
  for (auto& e : ev) e.assign(n, nullptr);
  for (const auto& e : script.events) {
    for (int t = e.start; t < e.end; ++t) {
      const auto tu = static_cast<std::size_t>(t);
      if (e.type == LocationCode::kH2H) {
        ev[0][tu] = ev[1][tu] = &e;
      } else if (is_hand_code(e.type)) {
        ev[*e.hand == Hand::kLeft ? 0 : 1][tu] = &e;
      } else {
        ev[2][tu] = &e;
      }
    }
  }
  auto& truth = out.truth;
  truth.timeline.left_hand.assign(n, LocationCode::kHF);
  truth.timeline.right_hand.assign(n, LocationCode::kHF);
  truth.timeline.legs.assign(n, LocationCode::kL2G);
  truth.left_dynamic.assign(n, 0);
  truth.right_dynamic.assign(n, 0);
  truth.leg_dynamic.assign(n, 0);

  Rng rng(script.seed);
  Rng pose_rng = rng.split();
  Rng side_rng = rng.split();

  out.pose.fps = fps;
  out.pose.schema = synthetic_schema();
  out.pose.frames.resize(n);

  const auto osc = [fps](const ScriptEvent* e, std::size_t t) {
    if (!e || !e->oscillate) return 0.0;
    const double phase = 2.0 * std::numbers::pi * e->freq_hz * static_cast<double>(static_cast<int>(t) - e->start) / fps;
    return e->amplitude * std::sin(phase);
  };

  for (std::size_t t = 0; t < n; ++t) {
    const ScriptEvent* le = ev[0][t];
    const ScriptEvent* re = ev[1][t];
    const ScriptEvent* ge = ev[2][t];
    const LocationCode lc = le ? le->type : LocationCode::kHF;
    const LocationCode rc = re ? re->type : LocationCode::kHF;
    const LocationCode gc = ge ? ge->type : LocationCode::kL2G;
    truth.timeline.left_hand[t] = lc;
    truth.timeline.right_hand[t] = rc;
    truth.timeline.legs[t] = gc;
    truth.left_dynamic[t] = le && le->oscillate ? 1 : 0;
    truth.right_dynamic[t] = re && re->oscillate ? 1 : 0;
    truth.leg_dynamic[t] = ge && ge->oscillate ? 1 : 0;

    const LegPose legs = leg_pose(gc == LocationCode::kL2L);
    ArmPose arm[2];
    if (lc == LocationCode::kH2A) {
      arm[1] = arm_pose(1, rc, legs, nullptr);
      arm[0] = arm_pose(0, lc, legs, &arm[1]);
    } else {
      arm[0] = arm_pose(0, lc, legs, nullptr);
      arm[1] = arm_pose(1, rc, legs, &arm[0]);
    }
    const double dl = osc(le, t), dr = osc(re, t), dg = osc(ge, t);
    arm[0].center.x += dl;
    arm[1].center.x += dr;

    std::array<Vec, kPointCount> u{};
    u[kNose] = {0.0, -0.35};
    u[kREye] = {-0.06, -0.4};
    u[kLEye] = {0.06, -0.4};
    u[kREar] = {-0.12, -0.37};
    u[kLEar] = {0.12, -0.37};
    u[kNeckIdx] = {0.0, 0.0};
    u[kMidHipIdx] = {0.0, 1.0};
    u[kLShoulder] = {0.35, 0.0};
    u[kRShoulder] = {-0.35, 0.0};
    u[kLElbow] = arm[0].elbow;
    u[kRElbow] = arm[1].elbow;
    u[kLWrist] = wrist_of(arm[0]);
    u[kRWrist] = wrist_of(arm[1]);
    const Vec leg_shift{dg, 0.0};
    u[kLHip] = legs.hip[0];
    u[kRHip] = legs.hip[1];
    u[kLKnee] = legs.knee[0] + leg_shift;
    u[kRKnee] = legs.knee[1];
    u[kLAnkle] = legs.ankle[0] + leg_shift;
    u[kRAnkle] = legs.ankle[1];
    u[kLBigToe] = u[kLAnkle] + Vec{0.08, 0.08};
    u[kLSmallToe] = u[kLAnkle] + Vec{0.12, 0.07};
    u[kLHeel] = u[kLAnkle] + Vec{-0.02, 0.06};
    u[kRBigToe] = u[kRAnkle] + Vec{-0.08, 0.08};
    u[kRSmallToe] = u[kRAnkle] + Vec{-0.12, 0.07};
    u[kRHeel] = u[kRAnkle] + Vec{0.02, 0.06};
    static constexpr Vec kHandOffsets[5] = {{0.0, 0.0}, {-0.06, -0.06}, {0.06, -0.06}, {0.06, 0.06}, {-0.06, 0.06}};
    for (int k = 0; k < 5; ++k) {
      u[static_cast<std::size_t>(kLeftHand + k)] = arm[0].center + kHandOffsets[k];
      u[static_cast<std::size_t>(kRightHand + k)] = arm[1].center + kHandOffsets[k];
    }

    auto& frame = out.pose.frames[t];
    frame.t = static_cast<int>(t);
    frame.points.resize(kPointCount);
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double jx = script.jitter * pose_rng.normal();
      const double jy = script.jitter * pose_rng.normal();
      const double conf = quantize(pose_rng.uniform(0.7, 1.0), 0.01);
      auto& kp = frame.points[k];
      if (script.missing_rate > 0.0 && pose_rng.bernoulli(script.missing_rate)) {
        kp = {kNaN, kNaN, 0.0};
        continue;
      }
      kp.x = quantize(script.origin_x + script.scale_px * (u[k].x + jx), 1e-3);
      kp.y = quantize(script.origin_y + script.scale_px * (u[k].y + jy), 1e-3);
      kp.confidence = conf;
    }
  }

  // Sidecars: cohort-shifted Gaussian noise around a per-participant offset.
  const auto make_table = [&](const std::string& group, int dim, const std::string& prefix, double rate,
                              std::size_t samples) {
    TimedTable tab;
    for (int d = 0; d < dim; ++d) {
      char name[32];
      std::snprintf(name, sizeof(name), "%s%02d", prefix.c_str(), d + 1);
      tab.columns.emplace_back(name);
    }
    auto it = script.sidecar_shift.find(group);
    const double shift = it == script.sidecar_shift.end() ? 0.0 : it->second;
    auto sc = script.sidecar_scale.find(group);
    const double scale = sc == script.sidecar_scale.end() ? 1.0 : sc->second;
    std::vector<double> base(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d)
      base[static_cast<std::size_t>(d)] = script.participant_spread * side_rng.normal() + shift * ((d % 2 == 0) ? 1.0 : -1.0);
    for (std::size_t i = 0; i < samples; ++i) {
      tab.timestamps.push_back(static_cast<double>(i) / rate);
      std::vector<double> row(static_cast<std::size_t>(dim));
      for (int d = 0; d < dim; ++d)
        row[static_cast<std::size_t>(d)] = quantize(base[static_cast<std::size_t>(d)] + scale * side_rng.normal(), 1e-4);
      tab.rows.push_back(std::move(row));
    }
    return tab;
  };
  out.aus = make_table("AUs", kAuDim, "AU", fps, n);
  out.gaze = make_table("Gaze", kGazeDim, "gaze_", fps, n);
  const auto mfcc_samples = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / fps * 100.0));
  out.mfcc = make_table("MFCCs", kMfccDim, "mfcc_", 100.0, mfcc_samples);

  double cursor = 0.0;
  auto speaking = script.speaking;
  std::sort(speaking.begin(), speaking.end());
  for (const auto& [a, b] : speaking) {
    if (a > cursor) out.diarization.push_back({cursor, a, kInterviewerSpeaker});
    out.diarization.push_back({a, b, kParticipantSpeaker});
    cursor = std::max(cursor, b);
  }
  const double duration = static_cast<double>(n) / fps;
  if (cursor < duration) out.diarization.push_back({cursor, quantize(duration, 0.01), kInterviewerSpeaker});
  return out;
}

void write_session(const SyntheticSession& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "pose.jsonl", format_pose(s.pose));
  write_file(dir / "aus.csv", format_timed_csv(s.aus));
  write_file(dir / "gaze.csv", format_timed_csv(s.gaze));
  write_file(dir / "mfcc.csv", format_timed_csv(s.mfcc));
  write_file(dir / "diarization.csv", format_diarization(s.diarization));
  write_file(dir / "truth.csv", format_truth_csv(s.truth));
  write_file(dir / "script.json", format_script(s.script));
}

Script benchmark_script(const BenchmarkConfig& config, int index) {
  Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(index)));
  const bool high = index % 2 == 0;
  const CohortRates& rates = high ? config.high : config.low;
  Script s;
  char id[16];
  std::snprintf(id, sizeof(id), "P%02d", index + 1);
  s.participant = id;
  s.seed = mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(index));
  s.fps = config.fps;
  s.frames = static_cast<int>(std::lround(config.duration_s * config.fps));
  s.missing_rate = 0.001;
  s.phq8 = high ? static_cast<double>(10 + rng.index(11)) : static_cast<double>(rng.index(6));
  s.gad7 = high ? static_cast<double>(8 + rng.index(11)) : static_cast<double>(rng.index(5));
  s.sidecar_shift = {{"AUs", rates.sidecar_shift}, {"Gaze", 0.75 * rates.sidecar_shift},
                     {"MFCCs", 0.75 * rates.sidecar_shift}};
  s.sidecar_scale = {{"AUs", rates.sidecar_scale}, {"Gaze", rates.sidecar_scale}, {"MFCCs", rates.sidecar_scale}};

  const double k = config.fps / 26.0;
  const auto frames_between = [&rng, k](int lo, int hi) {
    return static_cast<int>(std::lround(k * (lo + static_cast<double>(rng.index(static_cast<std::size_t>(hi - lo + 1))))));
  };
  const auto motion = [&rng](ScriptEvent& e, double p) {
    e.oscillate = rng.bernoulli(p);
    e.freq_hz = quantize(rng.uniform(0.8, 2.0), 0.01);
    e.amplitude = quantize(rng.uniform(0.04, 0.06), 0.001);
  };

  // Hand events, one at a time.
  int t = frames_between(20, 80);
  while (true) {
    ScriptEvent e;
    const double r = rng.uniform();
    e.type = r < 0.2    ? LocationCode::kH2H
             : r < 0.4  ? LocationCode::kH2A
             : r < 0.62 ? LocationCode::kH2L
             : r < 0.85 ? LocationCode::kH2F
                        : LocationCode::kHF;
    if (e.type != LocationCode::kH2H) e.hand = rng.bernoulli(0.5) ? Hand::kLeft : Hand::kRight;
    const int dur = e.type == LocationCode::kH2F ? frames_between(60, 200) : frames_between(130, 300);
    if (t + dur > s.frames - 10) break;
    e.start = t;
    e.end = t + dur;
    motion(e, e.type == LocationCode::kHF ? 1.0 : rates.hand_dynamic);
    s.events.push_back(e);
    t = e.end + frames_between(60, 160);
  }
  // Leg events.
  t = frames_between(30, 150);
  while (true) {
    ScriptEvent e;
    e.type = rng.bernoulli(0.6) ? LocationCode::kL2L : LocationCode::kL2G;
    const int dur = frames_between(150, 400);
    if (t + dur > s.frames - 10) break;
    e.start = t;
    e.end = t + dur;
    motion(e, rates.leg_dynamic);
    s.events.push_back(e);
    t = e.end + frames_between(80, 250);
  }
  // Alternating conversation turns, interviewer first.
  const double duration = static_cast<double>(s.frames) / s.fps;
  double c = quantize(rng.uniform(2.0, 6.0), 0.01);
  while (c < duration) {
    const double end = std::min(quantize(c + rng.uniform(2.0, 8.0), 0.01), quantize(duration, 0.01));
    if (end > c) s.speaking.emplace_back(c, end);
    c = quantize(end + rng.uniform(2.0, 6.0), 0.01);
  }
  return s;
}

void make_benchmark(const BenchmarkConfig& config, const std::filesystem::path& dir) {
  if (config.participants < 6) {
    throw ConfigError("participants must be at least 6 for 3-fold participant-independent evaluation, got " +
                      std::to_string(config.participants));
  }
  std::filesystem::create_directories(dir / "sessions");
  write_file(dir / "schema.json", synthetic_schema().to_json() + "\n");
  nlohmann::ordered_json corpus;
  corpus["version"] = 1;
  corpus["fps"] = config.fps;
  corpus["schema"] = "schema.json";
  corpus["labels"] = "labels.csv";
  corpus["participant_speaker"] = kParticipantSpeaker;
  corpus["seed"] = config.seed;
  corpus["sessions"] = nlohmann::ordered_json::array();
  std::string labels = "participant,phq8,gad7,depression,anxiety\n";
  for (int i = 0; i < config.participants; ++i) {
    const Script s = benchmark_script(config, i);
    const auto session = generate(s);
    const std::string rel = "sessions/" + s.participant;
    write_session(session, dir / rel);
    nlohmann::ordered_json e;
    e["id"] = s.participant;
    e["dir"] = rel;
    e["cohort"] = i % 2 == 0 ? "high" : "low";
    corpus["sessions"].push_back(std::move(e));
    labels += s.participant + ',' + format_double(s.phq8) + ',' + format_double(s.gad7) + ',' +
              std::to_string(depression_label(s.phq8)) + ',' + std::to_string(anxiety_label(s.gad7)) + '\n';
  }
  write_file(dir / "labels.csv", labels);
  write_file(dir / "corpus.json", corpus.dump(2) + "\n");
}

}  // namespace fidget
