#include "helpers.hpp"
#include "oracles.hpp"

#include "fidget/errors.hpp"
#include "fidget/ingest.hpp"
#include "fidget/random.hpp"
#include "fidget/signal.hpp"
#include "fidget/synth.hpp"
#include "fidget/text.hpp"

#include <doctest.h>

#include <cmath>

using namespace fidget;

namespace {

PoseSequence tiny_sequence(int frames) {
  Script s;
  s.frames = frames;
  s.jitter = 0.0;
  return generate(s).pose;
}

}  // namespace

TEST_CASE("savgol preserves cubics on interior frames") {
  std::vector<double> y;
  for (int t = 0; t < 60; ++t) {
    const double x = t * 0.1;
    y.push_back(0.3 - 1.2 * x + 0.7 * x * x - 0.05 * x * x * x);
  }
  const auto s = savgol_filter(y, 11, 3);
  for (std::size_t t = 5; t + 5 < y.size(); ++t) CHECK(std::abs(s[t] - y[t]) < 1e-9);
}

TEST_CASE("savgol matches a local least-squares fit") {
  Rng rng(3);
  std::vector<double> y;
  for (int t = 0; t < 40; ++t) y.push_back(rng.normal());
  const auto s = savgol_filter(y, 11, 3);
  for (int t = 5; t + 5 < 40; ++t) CHECK(std::abs(s[static_cast<std::size_t>(t)] - oracle::local_poly_fit(y, t, 5, 3)) < 1e-10);
  const auto w = savgol_coefficients(11, 3);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("savgol mirror padding at the edges") {
  std::vector<double> y = {1, 4, 2, 8, 5, 7, 3, 9, 6, 0, 2, 5};
  const auto s = savgol_filter(y, 11, 3);
  std::vector<double> padded;
  for (int k = 5; k >= 1; --k) padded.push_back(y[static_cast<std::size_t>(k)]);
  padded.insert(padded.end(), y.begin(), y.end());
  for (int k = 1; k <= 5; ++k) padded.push_back(y[y.size() - 1 - static_cast<std::size_t>(k)]);
  for (std::size_t t = 0; t < y.size(); ++t)
    CHECK(s[t] == doctest::Approx(oracle::local_poly_fit(padded, static_cast<int>(t) + 5, 5, 3)).epsilon(1e-10));
}

TEST_CASE("not-a-knot spline recovers a deleted cubic sample") {
  const auto f = [](double x) { return 2.0 - x + 0.5 * x * x - 0.125 * x * x * x; };
  std::vector<double> xs, ys;
  for (int t = 0; t < 12; ++t) {
    if (t == 6) continue;
    xs.push_back(t);
    ys.push_back(f(t));
  }
  CubicSpline spline(xs, ys);
  CHECK(std::abs(spline(6.0) - f(6.0)) < 1e-6);
  CHECK(std::abs(spline(2.5) - f(2.5)) < 1e-6);
  CHECK_THROWS(CubicSpline({0, 1, 2}, {0, 1, 2}));
}

TEST_CASE("interpolate_missing fills gaps and keeps observed samples") {
  PoseSequence seq = tiny_sequence(30);
  for (auto& f : seq.frames) {
    const double t = f.t;
    f.points[0].x = 100 + 2 * t + 0.1 * t * t - 0.002 * t * t * t;
  }
  const double truth = seq.frames[12].points[0].x;
  seq.frames[12].points[0] = {kNaN, kNaN, 0.0};
  const auto filled = interpolate_missing(seq);
  CHECK(std::abs(filled.frames[12].points[0].x - truth) < 1e-6);
  CHECK(filled.frames[11].points[0].x == seq.frames[11].points[0].x);
}

TEST_CASE("normalize_scale divides by the median torso length") {
  PoseSequence seq = tiny_sequence(20);
  const double torso = torso_length(seq);
  CHECK(torso == doctest::Approx(180.0).epsilon(1e-6));
  const auto n = normalize_scale(seq);
  CHECK(torso_length(n) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pose parsing reports file, line and field") {
  const auto schema = synthetic_schema();
  std::string good = format_pose(tiny_sequence(3));
  CHECK(parse_pose(good, 26.0, schema).size() == 3);
  const std::string bad = good.substr(0, good.find('\n') + 1) + "{\"t\": 1, \"points\": [[1, \"x\", 0.5]]}\n";
  try {
    parse_pose(bad, 26.0, schema, "clip.jsonl");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("clip.jsonl") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("'y'") != std::string::npos);
  }
  const std::string short_frame = "{\"t\": 0, \"points\": [[1, 2, 0.5]]}\n";
  CHECK_THROWS_AS(parse_pose(short_frame, 26.0, schema), SchemaError);
}

TEST_CASE("sidecar resampling and speaking track") {
  TimedTable t = parse_timed_csv("timestamp,a,b\n0,1,10\n0.05,2,20\n0.1,nan,30\n");
  CHECK(t.rows.size() == 3);
  CHECK(std::isnan(t.rows[2][0]));
  const auto track = resample_nearest(t, "X", 3, 20.0);
  CHECK(track.values(0, 1) == 2.0);
  CHECK(track.values(1, 2) == 30.0);
  CHECK_THROWS_AS(parse_timed_csv("timestamp,a\n0,1\n0.1,oops\n", "aus.csv"), ParseError);

  const auto iv = parse_diarization("start_s,end_s,speaker_id\n0.0,0.1,p\n0.1,0.2,i\n");
  const auto sp = speaking_from_intervals(iv, "p", 5, 20.0);
  CHECK(sp.speaking == std::vector<std::uint8_t>{1, 1, 0, 0, 0});
  const auto filled = fill_track_gaps(track);
  CHECK(filled.values(0, 2) == 2.0);
}

TEST_CASE("timed csv round trip") {
  TimedTable t;
  t.columns = {"a", "b"};
  t.timestamps = {0.0, 1.0 / 26.0};
  t.rows = {{0.1, kNaN}, {-2.5, 3.0}};
  const auto back = parse_timed_csv(format_timed_csv(t));
  CHECK(back.timestamps == t.timestamps);
  CHECK(back.rows[0][0] == 0.1);
  CHECK(std::isnan(back.rows[0][1]));
}
