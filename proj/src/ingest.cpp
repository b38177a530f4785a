#include "fidget/ingest.hpp"

#include "fidget/errors.hpp"
#include "fidget/log.hpp"
#include "fidget/signal.hpp"
#include "fidget/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace fidget {

using nlohmann::json;

const FeatureTrack* Session::track(const std::string& name) const {
  for (const auto& t : tracks)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

double json_coord(const json& v, const std::string& where, const char* field) {
  if (v.is_null()) return kNaN;
  if (!v.is_number()) throw ParseError(where + ": field '" + field + "' is not a number");
  return v.get<double>();
}

FramePose parse_frame(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": frame is not a JSON object");
  FramePose frame;
  auto t = obj.find("t");
  if (t == obj.end() || !t->is_number_integer())
    throw ParseError(where + ": field 't' missing or not an integer");
  frame.t = t->get<int>();
  auto pts = obj.find("points");
  if (pts == obj.end() || !pts->is_array())
    throw ParseError(where + ": field 'points' missing or not an array");
  frame.points.reserve(pts->size());
  std::size_t k = 0;
  for (const auto& p : *pts) {
    const std::string pw = where + ": points[" + std::to_string(k++) + "]";
    Keypoint kp;
    if (p.is_null()) {
      frame.points.push_back(kp);
      continue;
    }
    if (!p.is_array() || p.size() < 2 || p.size() > 3)
      throw ParseError(pw + ": expected [x, y, c]");
    kp.x = json_coord(p[0], pw, "x");
    kp.y = json_coord(p[1], pw, "y");
    if (p.size() == 3) {
      kp.confidence = json_coord(p[2], pw, "c");
      if (std::isfinite(kp.confidence) && (kp.confidence < 0.0 || kp.confidence > 1.0))
        throw ParseError(pw + ": field 'c' outside [0, 1]");
    }
    frame.points.push_back(kp);
  }
  return frame;
}

void check_frames(const PoseSequence& seq, const std::string& source) {
  const int expected = seq.schema.num_keypoints();
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& f = seq.frames[i];
    if (static_cast<int>(f.points.size()) != expected) {
      throw SchemaError(source + ": frame " + std::to_string(f.t) + " has " +
                        std::to_string(f.points.size()) + " keypoints, schema expects " +
                        std::to_string(expected));
    }
    if (i > 0 && f.t <= seq.frames[i - 1].t)
      throw ParseError(source + ": frame t=" + std::to_string(f.t) + " is not increasing");
  }
}

}  // namespace

PoseSequence parse_pose(const std::string& text, double fps, const KeypointSchema& schema,
                        const std::string& source) {
  if (!(fps > 0.0)) throw DataError(source + ": fps must be positive");
  PoseSequence seq;
  seq.fps = fps;
  seq.schema = schema;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    json arr;
    try {
      arr = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(source + ": " + e.what());
    }
    std::size_t i = 0;
    for (const auto& obj : arr) seq.frames.push_back(parse_frame(obj, source + " frame " + std::to_string(i++)));
  } else {
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
      ++line_no;
      line = trim(line);
      if (line.empty()) continue;
      const std::string where = source + " line " + std::to_string(line_no);
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
      }
      seq.frames.push_back(parse_frame(obj, where));
    }
  }
  check_frames(seq, source);
  return seq;
}

PoseSequence load_pose(const std::filesystem::path& path, double fps, const KeypointSchema& schema) {
  return parse_pose(read_file(path), fps, schema, path.string());
}

std::string format_pose(const PoseSequence& seq) {
  std::string out;
  for (const auto& f : seq.frames) {
    out += "{\"t\":" + std::to_string(f.t) + ",\"points\":[";
    for (std::size_t k = 0; k < f.points.size(); ++k) {
      const auto& p = f.points[k];
      if (k) out += ',';
      auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
      out += '[' + num(p.x) + ',' + num(p.y) + ',' + num(p.confidence) + ']';
    }
    out += "]}\n";
  }
  return out;
}

TimedTable parse_timed_csv(const std::string& text, const std::string& source) {
  TimedTable table;
  std::size_t line_no = 0;
  bool header = true;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (header) {
      if (cells.size() < 2) throw ParseError(source + " line 1: header needs a timestamp and at least one column");
      for (std::size_t c = 1; c < cells.size(); ++c) table.columns.emplace_back(trim(cells[c]));
      header = false;
      continue;
    }
    const std::string where = source + " line " + std::to_string(line_no);
    if (cells.size() != table.columns.size() + 1) {
      throw ParseError(where + ": expected " + std::to_string(table.columns.size() + 1) +
                       " fields, found " + std::to_string(cells.size()));
    }
    double ts = 0.0;
    if (!parse_double(cells[0], ts) || !std::isfinite(ts))
      throw ParseError(where + ": field 'timestamp' is not a number");
    if (!table.timestamps.empty() && ts < table.timestamps.back())
      throw ParseError(where + ": timestamps must be non-decreasing");
    std::vector<double> row(table.columns.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!parse_double(cells[c + 1], row[c]))
        throw ParseError(where + ": field '" + table.columns[c] + "' is not a number");
    }
    table.timestamps.push_back(ts);
    table.rows.push_back(std::move(row));
  }
  if (header) throw ParseError(source + ": empty file");
  return table;
}

TimedTable load_timed_csv(const std::filesystem::path& path) {
  return parse_timed_csv(read_file(path), path.string());
}

std::string format_timed_csv(const TimedTable& table) {
  std::string out = "timestamp";
  for (const auto& c : table.columns) out += ',' + c;
  out += '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += format_double(table.timestamps[r]);
    for (double v : table.rows[r]) out += ',' + (std::isnan(v) ? std::string("nan") : format_double(v));
    out += '\n';
  }
  return out;
}

FeatureTrack resample_nearest(const TimedTable& table, const std::string& name,
                              std::size_t n_frames, double fps) {
  if (table.timestamps.empty()) throw DataError("track '" + name + "' has no samples");
  const int expected = expected_track_dim(name);
  if (expected > 0 && static_cast<int>(table.columns.size()) != expected) {
    throw SchemaError("track '" + name + "' has " + std::to_string(table.columns.size()) +
                      " columns, expected " + std::to_string(expected));
  }
  FeatureTrack track;
  track.name = name;
  track.columns = table.columns;
  const auto dim = static_cast<Eigen::Index>(table.columns.size());
  track.values.resize(dim, static_cast<Eigen::Index>(n_frames));
  const auto& ts = table.timestamps;
  for (std::size_t i = 0; i < n_frames; ++i) {
    const double t = static_cast<double>(i) / fps;
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    std::size_t j = 0;
    if (it == ts.end()) {
      j = ts.size() - 1;
    } else {
      j = static_cast<std::size_t>(it - ts.begin());
      if (j > 0 && (t - ts[j - 1]) <= (ts[j] - t)) --j;
      // lower_bound lands on the first of equal timestamps already
    }
    for (Eigen::Index d = 0; d < dim; ++d)
      track.values(d, static_cast<Eigen::Index>(i)) = table.rows[j][static_cast<std::size_t>(d)];
  }
  return track;
}

std::vector<DiarizationInterval> parse_diarization(const std::string& text, const std::string& source) {
  std::vector<DiarizationInterval> out;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    const std::string where = source + " line " + std::to_string(line_no);
    if (cells.size() != 3) throw ParseError(where + ": expected start_s,end_s,speaker_id");
    DiarizationInterval iv;
    if (!parse_double(cells[0], iv.start_s) || std::isnan(iv.start_s)) {
      if (out.empty() && line_no == 1) continue;  // header row
      throw ParseError(where + ": field 'start_s' is not a number");
    }
    if (!parse_double(cells[1], iv.end_s) || std::isnan(iv.end_s))
      throw ParseError(where + ": field 'end_s' is not a number");
    if (iv.end_s < iv.start_s) throw ParseError(where + ": end_s precedes start_s");
    iv.speaker = std::string(trim(cells[2]));
    out.push_back(std::move(iv));
  }
  return out;
}

std::vector<DiarizationInterval> load_diarization(const std::filesystem::path& path) {
  return parse_diarization(read_file(path), path.string());
}

std::string format_diarization(const std::vector<DiarizationInterval>& intervals) {
  std::string out = "start_s,end_s,speaker_id\n";
  for (const auto& iv : intervals)
    out += format_double(iv.start_s) + ',' + format_double(iv.end_s) + ',' + iv.speaker + '\n';
  return out;
}

SpeakingTrack speaking_from_intervals(const std::vector<DiarizationInterval>& intervals,
                                      const std::string& participant, std::size_t n_frames,
                                      double fps) {
  SpeakingTrack track;
  track.speaking.assign(n_frames, 0);
  for (const auto& iv : intervals) {
    if (iv.speaker != participant) continue;
    // frames with start <= i/fps < end
    const auto first = static_cast<long>(std::ceil(iv.start_s * fps - 1e-9));
    const auto last = static_cast<long>(std::ceil(iv.end_s * fps - 1e-9));  // exclusive
    for (long i = std::max(0L, first); i < std::min(last, static_cast<long>(n_frames)); ++i)
      track.speaking[static_cast<std::size_t>(i)] = 1;
  }
  return track;
}

Session load_session(const std::filesystem::path& pose_path, const SidecarPaths& sidecars,
                     const KeypointSchema& schema, double fps) {
  Session s;
  s.pose = load_pose(pose_path, fps, schema);
  const std::size_t n = s.pose.size();
  auto add = [&](const std::optional<std::filesystem::path>& p, const char* name) {
    if (p) s.tracks.push_back(resample_nearest(load_timed_csv(*p), name, n, fps));
  };
  add(sidecars.aus, "AUs");
  add(sidecars.gaze, "Gaze");
  add(sidecars.mfcc, "MFCCs");
  if (sidecars.diarization) {
    s.speaking = speaking_from_intervals(load_diarization(*sidecars.diarization),
                                         sidecars.participant_speaker, n, fps);
  } else {
    s.speaking.speaking.assign(n, 0);
  }
  return s;
}

namespace {

// Frame positions with a usable detection for keypoint k.
std::vector<std::size_t> observed_frames(const PoseSequence& seq, int k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < seq.frames.size(); ++i)
    if (!seq.frames[i].points[static_cast<std::size_t>(k)].missing()) idx.push_back(i);
  return idx;
}

void fill_from_observed(PoseSequence& out, int k, const std::vector<std::size_t>& obs) {
  const auto ku = static_cast<std::size_t>(k);
  const std::size_t n = out.frames.size();
  std::vector<double> t, xs, ys;
  for (std::size_t i : obs) {
    t.push_back(static_cast<double>(i));
    xs.push_back(out.frames[i].points[ku].x);
    ys.push_back(out.frames[i].points[ku].y);
  }
  auto interp = [&](const std::vector<double>& v, double at) -> double {
    // piecewise linear for sparse data
    auto it = std::upper_bound(t.begin(), t.end(), at);
    const std::size_t j = static_cast<std::size_t>(it - t.begin());
    const double w = (at - t[j - 1]) / (t[j] - t[j - 1]);
    return v[j - 1] + w * (v[j] - v[j - 1]);
  };
  std::optional<CubicSpline> sx, sy;
  if (obs.size() >= 4) {
    sx.emplace(t, xs);
    sy.emplace(t, ys);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = out.frames[i].points[ku];
    if (!p.missing()) continue;
    const auto di = static_cast<double>(i);
    if (i < obs.front()) {
      p.x = xs.front();
      p.y = ys.front();
    } else if (i > obs.back()) {
      p.x = xs.back();
      p.y = ys.back();
    } else if (sx) {
      p.x = (*sx)(di);
      p.y = (*sy)(di);
    } else {
      p.x = interp(xs, di);
      p.y = interp(ys, di);
    }
    p.confidence = kNaN;
  }
}

}  // namespace

PoseSequence interpolate_missing(const PoseSequence& seq) {
  PoseSequence out = seq;
  const int nk = seq.num_keypoints();
  if (seq.frames.empty()) return out;

  std::vector<int> sparse;
  std::vector<std::vector<std::size_t>> obs(static_cast<std::size_t>(nk));
  for (int k = 0; k < nk; ++k) {
    auto& o = obs[static_cast<std::size_t>(k)];
    o = observed_frames(seq, k);
    if (o.size() == seq.frames.size()) continue;
    if (o.size() >= 4) {
      fill_from_observed(out, k, o);
    } else {
      sparse.push_back(k);
    }
  }
  if (sparse.empty()) return out;

  const std::set<int> sparse_set(sparse.begin(), sparse.end());
  static const char* kGroupOrder[] = {KeypointSchema::kHandLeft, KeypointSchema::kHandRight,
                                      KeypointSchema::kFace, KeypointSchema::kHead,
                                      KeypointSchema::kLegs};
  for (int k : sparse) {
    const auto ku = static_cast<std::size_t>(k);
    std::vector<int> donors;
    for (const char* g : kGroupOrder) {
      std::vector<int> members;
      if (std::string(g) == KeypointSchema::kLegs) {
        if (!seq.schema.has(KeypointSchema::kUpperLegLeft) && !seq.schema.has(KeypointSchema::kLegs)) continue;
        members = seq.schema.leg_points();
      } else if (seq.schema.has(g)) {
        members = seq.schema.group(g);
      } else {
        continue;
      }
      if (std::find(members.begin(), members.end(), k) == members.end()) continue;
      for (int m : members)
        if (m != k && !sparse_set.count(m)) donors.push_back(m);
      if (!donors.empty()) break;
    }
    if (!donors.empty()) {
      log_warning("keypoint " + std::to_string(k) + " observed " + std::to_string(obs[ku].size()) +
                  " times; filling with its group centroid trajectory");
      for (auto& f : out.frames) {
        auto& p = f.points[ku];
        if (!p.missing()) continue;
        double cx = 0.0, cy = 0.0;
        for (int m : donors) {
          cx += f.points[static_cast<std::size_t>(m)].x;
          cy += f.points[static_cast<std::size_t>(m)].y;
        }
        p.x = cx / static_cast<double>(donors.size());
        p.y = cy / static_cast<double>(donors.size());
        p.confidence = kNaN;
      }
    } else if (!obs[ku].empty()) {
      log_warning("keypoint " + std::to_string(k) + " observed " + std::to_string(obs[ku].size()) +
                  " times and has no group donors; filling linearly");
      fill_from_observed(out, k, obs[ku]);
    } else {
      throw DataError("keypoint " + std::to_string(k) +
                      " is never observed and has no localization group to borrow from");
    }
  }
  return out;
}

PoseSequence smooth(const PoseSequence& seq, int window, int polyorder) {
  if (window < 1 || window % 2 == 0 || polyorder < 0 || polyorder >= window)
    throw std::invalid_argument("smooth: window must be odd and polyorder < window");
  if (seq.size() < static_cast<std::size_t>(window)) {
    throw DataError("sequence of " + std::to_string(seq.size()) + " frames is shorter than the smoothing window " +
                    std::to_string(window) + "; skip smoothing for this sequence");
  }
  if (!seq.fully_observed()) throw DataError("smooth: interpolate missing keypoints first");
  PoseSequence out = seq;
  const std::size_t n = seq.size();
  std::vector<double> xs(n), ys(n);
  for (int k = 0; k < seq.num_keypoints(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = seq.frames[i].points[ku].x;
      ys[i] = seq.frames[i].points[ku].y;
    }
    const auto sx = savgol_filter(xs, window, polyorder);
    const auto sy = savgol_filter(ys, window, polyorder);
    for (std::size_t i = 0; i < n; ++i) {
      out.frames[i].points[ku].x = sx[i];
      out.frames[i].points[ku].y = sy[i];
    }
  }
  return out;
}

double torso_length(const PoseSequence& seq) {
  const auto neck = static_cast<std::size_t>(seq.schema.group(KeypointSchema::kNeck).front());
  const auto hip = static_cast<std::size_t>(seq.schema.group(KeypointSchema::kMidHip).front());
  std::vector<double> d;
  d.reserve(seq.size());
  for (const auto& f : seq.frames) {
    const auto& a = f.points[neck];
    const auto& b = f.points[hip];
    if (!std::isfinite(a.x) || !std::isfinite(b.x)) continue;
    d.push_back(std::hypot(a.x - b.x, a.y - b.y));
  }
  if (d.empty()) throw DataError("torso length undefined: neck/mid-hip never observed");
  return median(std::move(d));
}

PoseSequence normalize_scale(const PoseSequence& seq) {
  const double scale = torso_length(seq);
  if (!(scale > 0.0)) throw DataError("torso length is zero; cannot normalize coordinates");
  PoseSequence out = seq;
  for (auto& f : out.frames) {
    for (auto& p : f.points) {
      p.x /= scale;
      p.y /= scale;
    }
  }
  return out;
}

PoseSequence preprocess(const PoseSequence& seq, int window, int polyorder) {
  PoseSequence filled = interpolate_missing(seq);
  if (filled.size() >= static_cast<std::size_t>(window)) {
    filled = smooth(filled, window, polyorder);
  } else {
    log_warning("sequence shorter than the smoothing window; smoothing skipped");
  }
  return normalize_scale(filled);
}

FeatureTrack fill_track_gaps(const FeatureTrack& track) {
  FeatureTrack out = track;
  const Eigen::Index n = track.length();
  for (Eigen::Index d = 0; d < track.dim(); ++d) {
    std::vector<Eigen::Index> obs;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::isfinite(track.values(d, i))) obs.push_back(i);
    if (static_cast<Eigen::Index>(obs.size()) == n) continue;
    if (obs.empty()) {
      log_warning("track '" + track.name + "' column " + std::to_string(d) + " is entirely missing; zero-filled");
      out.values.row(d).setZero();
      continue;
    }
    std::size_t j = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isfinite(track.values(d, i))) continue;
      while (j < obs.size() && obs[j] < i) ++j;
      if (j == 0) {
        out.values(d, i) = track.values(d, obs.front());
      } else if (j == obs.size()) {
        out.values(d, i) = track.values(d, obs.back());
      } else {
        const auto a = obs[j - 1], b = obs[j];
        const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
        out.values(d, i) = (1.0 - w) * track.values(d, a) + w * track.values(d, b);
      }
    }
  }
  return out;
}

}  // namespace fidget
