#include "helpers.hpp"

#include "fidget/adaptors.hpp"
#include "fidget/geometry.hpp"
#include "fidget/gestures.hpp"
#include "fidget/ingest.hpp"
#include "fidget/random.hpp"
#include "fidget/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace fidget;

namespace {

PoseSequence two_point_sequence(const std::vector<std::pair<Point2, Point2>>& frames) {
  PoseSequence seq;
  seq.fps = 26.0;
  seq.schema = KeypointSchema(2, {});
  int t = 0;
  for (const auto& [a, b] : frames) {
    FramePose f;
    f.t = t++;
    f.points = {{a.x, a.y, 1.0}, {b.x, b.y, 1.0}};
    seq.frames.push_back(f);
  }
  return seq;
}

// Brute-force convex polygon intersection: edge crossings or containment.
double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool segments_meet(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2), d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool inside(const std::array<Point2, 4>& poly, Point2 p) {
  int pos = 0, neg = 0;
  for (int i = 0; i < 4; ++i) {
    const double c = cross(poly[static_cast<std::size_t>(i)], poly[static_cast<std::size_t>((i + 1) % 4)], p);
    pos += c > 0;
    neg += c < 0;
  }
  return pos == 0 || neg == 0;
}

bool polygons_meet(const LimbBox& a, const LimbBox& b) {
  const auto pa = a.corners(), pb = b.corners();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (segments_meet(pa[static_cast<std::size_t>(i)], pa[static_cast<std::size_t>((i + 1) % 4)],
                        pb[static_cast<std::size_t>(j)], pb[static_cast<std::size_t>((j + 1) % 4)]))
        return true;
  return inside(pa, pb[0]) || inside(pb, pa[0]);
}

PoseSequence scripted(const std::vector<ScriptEvent>& events, int frames = 400) {
  Script s;
  s.frames = frames;
  s.jitter = 0.0;
  s.events = events;
  return normalize_scale(generate(s).pose);
}

}  // namespace

TEST_CASE("gesture surprise arithmetic") {
  CHECK(gesture_surprise(0.8, 2) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(gesture_surprise(0.8, 100) == doctest::Approx(0.008).epsilon(1e-15));
  CHECK(gesture_surprise(0.5, 0) == 1.0);
}

TEST_CASE("frame movement is the mean keypoint displacement") {
  const auto still = two_point_sequence({{{0, 0}, {1, 1}}, {{0, 0}, {1, 1}}});
  CHECK(frame_movement(still, {0, 1}).values == std::vector<double>{0.0});
  const auto pyth = two_point_sequence({{{0, 0}, {0, 0}}, {{3, 4}, {0, 0}}});
  CHECK(frame_movement(pyth, {0}).values[0] == doctest::Approx(5.0));
  const auto two = two_point_sequence({{{0, 0}, {0, 0}}, {{1, 0}, {0, 3}}});
  CHECK(frame_movement(two, {0, 1}).values[0] == doctest::Approx(2.0));
}

TEST_CASE("window movement") {
  const auto w = window_movement(std::vector<double>(30, 0.7), 10);
  REQUIRE(w.size() == 3);
  for (double v : w) CHECK(v == doctest::Approx(0.7));
  std::vector<double> f(10, 1.0);
  f.insert(f.end(), 10, 0.0);
  CHECK(window_movement(f, 10) == std::vector<double>{1.0, 0.0});
  CHECK(window_movement(std::vector<double>(25, 1.0), 10).size() == 2);
}

TEST_CASE("gesture state machine") {
  CHECK(detect_gestures({0.1, 0.2, 0.1}, 0.5).empty());
  auto g = detect_gestures({1, 0, 0, 0, 0}, 0.5);
  REQUIRE(g.size() == 1);
  CHECK(g[0].start_window == 0);
  CHECK(g[0].end_window == 0);
  g = detect_gestures({1, 0, 0, 1, 0, 0, 0}, 0.5);
  REQUIRE(g.size() == 1);
  CHECK(g[0].end_window == 3);
  g = detect_gestures({1, 0, 0, 0, 1, 1}, 0.5);
  REQUIRE(g.size() == 2);
  CHECK(g[1].start_window == 4);
  CHECK(g[1].end_window == 5);
}

TEST_CASE("motionless session has zero movement features") {
  Script s;
  s.frames = 120;
  s.jitter = 0.0;
  const auto v = body_gesture_features(normalize_scale(generate(s).pose));
  CHECK(v.get("O-FM") == 0.0);
  CHECK(v.get("O-GN") == 0.0);
  CHECK(v.get("O-GM") == 0.0);
  CHECK(v.get("Hn-GS") == 1.0);
}

TEST_CASE("limb box construction") {
  const std::array<Point2, 4> sq = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const auto b = LimbBox::bounding(sq);
  CHECK(b.center.x == 0.5);
  CHECK(b.half_length == 0.5);
  CHECK(b.half_width == 0.5);
  const auto fore = LimbBox::segment({0, 0}, {10, 0}, 2.0);
  CHECK(fore.center.x == 5.0);
  CHECK(fore.half_length == 5.0);
  CHECK(fore.half_width == 1.0);
  const auto dot = LimbBox::segment({2, 2}, {2, 2}, 2.0);
  CHECK(dot.half_length == 1.0);
  CHECK(dot.half_width == 1.0);
}

TEST_CASE("separating-axis test agrees with brute-force polygon intersection") {
  Rng rng(11);
  int agree = 0, hits = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto rand_box = [&rng]() {
      if (rng.bernoulli(0.3)) {
        std::array<Point2, 2> pts = {{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, {rng.uniform(-2, 2), rng.uniform(-2, 2)}}};
        return LimbBox::bounding(pts);
      }
      return LimbBox::segment({rng.uniform(-2, 2), rng.uniform(-2, 2)}, {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                              rng.uniform(0.05, 1.0));
    };
    const auto a = rand_box(), b = rand_box();
    const bool expected = polygons_meet(a, b);
    agree += overlaps(a, b) == expected;
    hits += expected;
  }
  CHECK(agree == 3000);
  CHECK(hits > 300);
}

TEST_CASE("adaptor detection on scripted sessions") {
  SUBCASE("hand on leg for 150 frames") {
    ScriptEvent e;
    e.type = LocationCode::kH2L;
    e.hand = Hand::kRight;
    e.start = 100;
    e.end = 250;
    const auto tl = detect_locations(scripted({e}));
    for (std::size_t t = 0; t < tl.size(); ++t) {
      const bool in = t >= 100 && t < 250;
      CHECK(tl.right_hand[t] == (in ? LocationCode::kH2L : LocationCode::kHF));
      CHECK(tl.left_hand[t] == LocationCode::kHF);
      CHECK(tl.legs[t] == LocationCode::kL2G);
    }
  }
  SUBCASE("short leg touch is filtered, short face touch is kept") {
    ScriptEvent leg{LocationCode::kH2L, Hand::kRight, 100, 150};
    ScriptEvent face{LocationCode::kH2F, Hand::kLeft, 200, 230};
    const auto tl = detect_locations(scripted({leg, face}));
    for (std::size_t t = 0; t < tl.size(); ++t) {
      CHECK(tl.right_hand[t] == LocationCode::kHF);
      CHECK(tl.left_hand[t] == (t >= 200 && t < 230 ? LocationCode::kH2F : LocationCode::kHF));
    }
  }
  SUBCASE("hands together, arm touch and crossed legs") {
    ScriptEvent hh{LocationCode::kH2H, std::nullopt, 0, 120};
    ScriptEvent arm{LocationCode::kH2A, Hand::kLeft, 200, 330};
    ScriptEvent legs{LocationCode::kL2L, std::nullopt, 50, 300};
    const auto tl = detect_locations(scripted({hh, arm, legs}));
    CHECK(tl.left_hand[10] == LocationCode::kH2H);
    CHECK(tl.right_hand[10] == LocationCode::kH2H);
    CHECK(tl.left_hand[250] == LocationCode::kH2A);
    CHECK(tl.right_hand[250] == LocationCode::kHF);
    CHECK(tl.legs[49] == LocationCode::kL2G);
    CHECK(tl.legs[50] == LocationCode::kL2L);
    CHECK(tl.legs[299] == LocationCode::kL2L);
  }
}

TEST_CASE("duration filter") {
  std::vector<LocationCode> c(300, LocationCode::kHF);
  for (int t = 10; t < 60; ++t) c[static_cast<std::size_t>(t)] = LocationCode::kH2L;
  for (int t = 100; t < 220; ++t) c[static_cast<std::size_t>(t)] = LocationCode::kH2A;
  for (int t = 250; t < 260; ++t) c[static_cast<std::size_t>(t)] = LocationCode::kH2F;
  filter_short_runs(c, 100);
  CHECK(c[30] == LocationCode::kHF);
  CHECK(c[150] == LocationCode::kH2A);
  CHECK(c[255] == LocationCode::kH2F);
  AdaptorConfig cfg;
  CHECK(min_duration_frames(26.0, cfg) == 100);
  CHECK(min_duration_frames(52.0, cfg) == 200);
}

TEST_CASE("timeline csv round trip") {
  ScriptEvent e{LocationCode::kH2F, Hand::kLeft, 5, 40};
  const auto tl = detect_locations(scripted({e}, 120));
  CHECK(parse_timeline_csv(format_timeline_csv(tl)) == tl);
}
