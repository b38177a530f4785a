#include "helpers.hpp"
#include "oracles.hpp"

#include "fidget/errors.hpp"
#include "fidget/fidgets.hpp"
#include "fidget/ingest.hpp"
#include "fidget/motion.hpp"
#include "fidget/random.hpp"
#include "fidget/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

using namespace fidget;

namespace {

LocationTimeline blank_timeline(std::size_t n) {
  return {std::vector<LocationCode>(n, LocationCode::kHF), std::vector<LocationCode>(n, LocationCode::kHF),
          std::vector<LocationCode>(n, LocationCode::kL2G)};
}

TrajectorySlice wave_slice(Rng& rng, bool moving, int rows = 10) {
  TrajectorySlice s;
  s.category = SliceCategory::kLeft;
  s.trajectories.resize(rows, 100);
  const double f = rng.uniform(1.0, 2.0), a = rng.uniform(0.03, 0.06), phase = rng.uniform(0, 6.28);
  for (int r = 0; r < rows; ++r) {
    const double base = rng.uniform(-1, 1);
    for (int t = 0; t < 100; ++t)
      s.trajectories(r, t) = base + 0.004 * rng.normal() +
                             (moving && r % 2 == 0 ? a * std::sin(2 * std::numbers::pi * f * t / 26.0 + phase) : 0.0);
  }
  return s;
}

struct Corpus {
  std::vector<SliceFeatures> features;
  std::vector<int> labels;
  std::vector<std::string> participants;
};

Corpus separable_corpus(std::uint64_t seed) {
  Rng rng(seed);
  Corpus c;
  for (int p = 0; p < 10; ++p)
    for (int i = 0; i < 20; ++i) {
      const bool moving = i % 2 == 0;
      c.features.push_back(slice_features(wave_slice(rng, moving), 26.0));
      c.labels.push_back(moving ? 1 : 0);
      c.participants.push_back("P" + std::to_string(p));
    }
  return c;
}

}  // namespace

TEST_CASE("band grid is 41 points from 0.5 to 2.5 Hz") {
  const auto g = band_grid();
  CHECK(g.size() == 41);
  CHECK(g.front() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.back() == doctest::Approx(2.5).epsilon(1e-15));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] - g[k - 1] == doctest::Approx(0.05));
}

TEST_CASE("band spectrum matches a zero-padded DFT at the grid frequencies") {
  Rng rng(3);
  std::vector<double> x(100);
  for (std::size_t t = 0; t < x.size(); ++t)
    x[t] = std::sin(2 * std::numbers::pi * 1.3 * static_cast<double>(t) / 26.0) + 0.3 * rng.normal() + 4.0;
  // 2600 samples at 26 fps put DFT bins every 0.01 Hz, so grid point k sits on bin 50 + 5k.
  const auto ref = oracle::dft_magnitude(x, 2600);
  const auto spec = band_spectrum(x, 26.0);
  for (std::size_t k = 0; k < spec.size(); ++k) CHECK(testutil::rel_err(spec[k], ref[50 + 5 * k]) < 1e-9);
}

TEST_CASE("1 Hz sinusoid peaks at the 1 Hz grid point") {
  std::vector<double> x(100);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2 * std::numbers::pi * static_cast<double>(t) / 26.0);
  const auto spec = band_spectrum(x, 26.0);
  const auto peak = static_cast<std::size_t>(std::max_element(spec.begin(), spec.end()) - spec.begin());
  CHECK(band_grid()[peak] == doctest::Approx(1.0));
}

TEST_CASE("slice features") {
  TrajectorySlice s;
  s.trajectories = Eigen::MatrixXd::Constant(4, 100, 0.0);
  for (int r = 0; r < 4; ++r) s.trajectories.row(r).setConstant(r + 0.5);
  auto f = slice_features(s, 26.0);
  CHECK(f.dim() == 41 + 8);
  for (double v : f.fft) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
  for (int r = 0; r < 4; ++r) {
    CHECK(f.std[static_cast<std::size_t>(r)] == 0.0);
    CHECK(f.mean[static_cast<std::size_t>(r)] == doctest::Approx(r + 0.5));
  }
  Rng rng(5);
  TrajectorySlice two;
  two.trajectories.resize(2, 100);
  for (int t = 0; t < 100; ++t) {
    two.trajectories(0, t) = rng.normal();
    two.trajectories(1, t) = std::cos(0.4 * t);
  }
  f = slice_features(two, 26.0);
  std::vector<double> r0(100), r1(100);
  for (int t = 0; t < 100; ++t) {
    r0[static_cast<std::size_t>(t)] = two.trajectories(0, t);
    r1[static_cast<std::size_t>(t)] = two.trajectories(1, t);
  }
  const auto a = band_spectrum(r0, 26.0), b = band_spectrum(r1, 26.0);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(f.fft[k] == doctest::Approx((a[k] + b[k]) / 2));
}

TEST_CASE("slice windows") {
  Script script;
  script.frames = 400;
  script.jitter = 0.0;
  const auto pose = normalize_scale(generate(script).pose);
  auto tl = blank_timeline(400);
  std::fill(tl.left_hand.begin(), tl.left_hand.begin() + 100, LocationCode::kH2H);
  std::fill(tl.right_hand.begin(), tl.right_hand.begin() + 100, LocationCode::kH2H);
  std::fill(tl.right_hand.begin() + 150, tl.right_hand.begin() + 350, LocationCode::kH2L);
  std::fill(tl.left_hand.begin() + 200, tl.left_hand.begin() + 299, LocationCode::kH2F);
  const auto slices = slice_sessions(pose, tl);
  std::vector<std::size_t> both, h2l, h2f;
  for (const auto& s : slices) {
    CHECK(s.length() == 100);
    if (s.category == SliceCategory::kBoth) both.push_back(s.start);
    if (s.code == LocationCode::kH2L) h2l.push_back(s.start);
    if (s.code == LocationCode::kH2F) h2f.push_back(s.start);
  }
  CHECK(both == std::vector<std::size_t>{0});
  CHECK(h2l == std::vector<std::size_t>{150, 200, 250});
  CHECK(h2f.empty());
  const auto right = category_points(pose.schema, SliceCategory::kRight);
  for (const auto& s : slices)
    if (s.category == SliceCategory::kRight) CHECK(s.trajectories.rows() == 2 * static_cast<Eigen::Index>(right.size()));
}

TEST_CASE("action classifier separates oscillating from still slices") {
  const auto c = separable_corpus(21);
  ActionTrainConfig cfg;
  cfg.n_trees = 40;
  cfg.seed = 4;
  const auto trained = train_action_classifier(SliceCategory::kLeft, c.features, c.labels, c.participants, cfg);
  CHECK(trained.cv.accuracy_mean >= 0.95);
  CHECK(trained.cv.fold_accuracy.size() == 5);

  SliceFeatures zero;
  zero.fft.assign(41, 0.0);
  zero.std.assign(10, 0.0);
  zero.mean.assign(10, 0.0);
  CHECK(classify_slice(trained.classifier, zero) == ActionLabel::kStatic);
  Rng rng(99);
  const auto strong = slice_features(wave_slice(rng, true), 26.0);
  CHECK(classify_slice(trained.classifier, strong) == ActionLabel::kDynamic);
  CHECK(trained.classifier.score(strong.flatten()) == trained.classifier.score(strong.flatten()));

  SliceFeatures shorter = zero;
  shorter.std.pop_back();
  CHECK_THROWS_AS(classify_slice(trained.classifier, shorter), ModelError);

  cfg.kind = ClassifierKind::kLinear;
  CHECK(train_action_classifier(SliceCategory::kLeft, c.features, c.labels, c.participants, cfg).cv.accuracy_mean >= 0.95);
}

TEST_CASE("permuted action labels give chance accuracy") {
  auto c = separable_corpus(22);
  Rng rng(8);
  for (auto& l : c.labels) l = rng.bernoulli(0.5) ? 1 : 0;
  ActionTrainConfig cfg;
  cfg.n_trees = 40;
  const auto trained = train_action_classifier(SliceCategory::kLeft, c.features, c.labels, c.participants, cfg);
  CHECK(trained.cv.accuracy_mean > 0.4);
  CHECK(trained.cv.accuracy_mean < 0.6);
}

TEST_CASE("action classifier errors") {
  auto c = separable_corpus(23);
  std::fill(c.labels.begin(), c.labels.end(), 1);
  CHECK_THROWS_AS(train_action_classifier(SliceCategory::kLeft, c.features, c.labels, c.participants), DataError);
}

TEST_CASE("action model file round trip") {
  const auto c = separable_corpus(24);
  ActionTrainConfig cfg;
  cfg.n_trees = 10;
  ActionModelSet set;
  set.set(train_action_classifier(SliceCategory::kLeft, c.features, c.labels, c.participants, cfg).classifier);
  const auto dir = testutil::scratch("motion_model");
  set.save(dir / "m.bin");
  const auto back = ActionModelSet::load(dir / "m.bin");
  REQUIRE(back.get(SliceCategory::kLeft) != nullptr);
  CHECK(back.get(SliceCategory::kRight) == nullptr);
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(back.get(SliceCategory::kLeft)->score(c.features[i].flatten()) ==
          set.get(SliceCategory::kLeft)->score(c.features[i].flatten()));

  {
    std::fstream f(dir / "m.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(12);
    f.put('\x5a');
  }
  CHECK_THROWS_AS(ActionModelSet::load(dir / "m.bin"), ModelError);
  CHECK_THROWS_AS(ActionModelSet::load(dir / "missing.bin"), ModelError);
}

TEST_CASE("fidget encoding") {
  auto tl = blank_timeline(300);
  std::fill(tl.left_hand.begin(), tl.left_hand.begin() + 100, LocationCode::kH2H);
  std::fill(tl.right_hand.begin(), tl.right_hand.begin() + 100, LocationCode::kH2H);
  std::fill(tl.right_hand.begin() + 100, tl.right_hand.begin() + 230, LocationCode::kH2L);
  std::fill(tl.legs.begin() + 100, tl.legs.end(), LocationCode::kL2L);

  SUBCASE("dynamic slices set their rows") {
    std::vector<SliceAction> actions = {
        {SliceCategory::kBoth, 0, 100, ActionLabel::kDynamic},
        {SliceCategory::kRight, 100, 100, ActionLabel::kDynamic},
        {SliceCategory::kLeg, 100, 100, ActionLabel::kDynamic},
        {SliceCategory::kLeg, 150, 100, ActionLabel::kStatic},
        {SliceCategory::kLeg, 200, 100, ActionLabel::kDynamic},
    };
    const auto m = encode_fidgets(tl, actions);
    REQUIRE(m.row_count() == 8);
    CHECK(m.frames() == 300);
    CHECK(m.rows[kChf][50] == 1);
    CHECK(m.rows[kShfLegLeft][50] == 0);
    CHECK(m.rows[kShfLegRight][150] == 1);
    CHECK(m.rows[kShfLegRight][229] == 1);  // tail inherits the last slice
    CHECK(m.rows[kShfLegRight][230] == 0);
    CHECK(m.rows[kLff][50] == 0);     // L2G leg run has no slice
    CHECK(m.rows[kLff][124] == 1);    // nearer the 100 slice centre
    CHECK(m.rows[kLff][175] == 0);    // nearer the 150 slice centre
    CHECK(m.rows[kLff][224] == 0);    // centres 199.5 and 249.5
    CHECK(m.rows[kLff][225] == 1);
    CHECK(m.rows[kLff][299] == 1);
    for (std::size_t t = 0; t < 300; ++t) {
      int s = 0;
      for (std::size_t r = 0; r < 8; ++r) s += m.rows[r][t];
      CHECK(s <= 2);
    }
  }
  SUBCASE("equidistant centres resolve to dynamic") {
    const auto m = encode_fidgets(tl, {{SliceCategory::kLeg, 100, 100, ActionLabel::kStatic},
                                       {SliceCategory::kLeg, 151, 100, ActionLabel::kDynamic}});
    CHECK(m.rows[kLff][174] == 0);
    CHECK(m.rows[kLff][175] == 1);  // 149.5 and 200.5 both 25.5 away
  }
  SUBCASE("static slices leave rows empty") {
    const auto m = encode_fidgets(tl, {{SliceCategory::kBoth, 0, 100, ActionLabel::kStatic}});
    for (const auto& row : m.rows) CHECK(row[50] == 0);
  }
  SUBCASE("speaking row") {
    const auto m = encode_fidgets(tl, {});
    SpeakingTrack quiet{std::vector<std::uint8_t>(300, 0)}, loud{std::vector<std::uint8_t>(300, 1)};
    const auto a = attach_speaking(m, quiet);
    CHECK(a.row_count() == 9);
    CHECK(strip_speaking(a) == m);
    CHECK(std::count(a.rows[kSpeakingRow].begin(), a.rows[kSpeakingRow].end(), 0) == 300);
    const auto b = attach_speaking(m, loud);
    CHECK(std::count(b.rows[kSpeakingRow].begin(), b.rows[kSpeakingRow].end(), 1) == 300);
    CHECK_THROWS_AS(attach_speaking(b, loud), DataError);
    CHECK_THROWS_AS(attach_speaking(m, SpeakingTrack{std::vector<std::uint8_t>(10, 0)}), DataError);
  }
}
