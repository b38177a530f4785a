#include "helpers.hpp"

#include "fidget/config.hpp"
#include "fidget/corpus.hpp"
#include "fidget/errors.hpp"
#include "fidget/synth.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace fidget;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("script validation") {
  Script s;
  s.frames = 500;
  s.events.push_back({LocationCode::kH2L, Hand::kRight, 10, 200});
  CHECK_NOTHROW(validate_script(s));
  s.events.push_back({LocationCode::kH2F, Hand::kRight, 150, 300});
  CHECK_THROWS_AS(validate_script(s), DataError);
  s.events.back() = {LocationCode::kH2H, std::nullopt, 150, 300};
  CHECK_THROWS_AS(validate_script(s), DataError);
  s.events.back() = {LocationCode::kH2F, std::nullopt, 250, 300};
  CHECK_THROWS_AS(validate_script(s), DataError);
  s.events.back() = {LocationCode::kH2F, Hand::kLeft, 250, 300, true, 3.0};
  CHECK_THROWS_AS(validate_script(s), DataError);
  s.events.back().freq_hz = 1.5;
  CHECK_NOTHROW(validate_script(s));
  s.events.back().end = 600;
  CHECK_THROWS_AS(validate_script(s), DataError);
  CHECK_THROWS_AS(parse_script(R"({"frames": 10, "colour": 1})"), ParseError);
}

TEST_CASE("script json round trip") {
  Script s;
  s.participant = "P07";
  s.seed = 42;
  s.frames = 300;
  s.events.push_back({LocationCode::kH2L, Hand::kRight, 0, 300, true, 1.5, 0.05});
  s.events.push_back({LocationCode::kL2L, std::nullopt, 20, 200});
  s.speaking = {{1.0, 4.0}};
  s.sidecar_shift["AUs"] = 0.5;
  s.phq8 = 12;
  const auto back = parse_script(format_script(s));
  CHECK(format_script(back) == format_script(s));
  CHECK(back.events.size() == 2);
  CHECK(back.events[0].oscillate);
  CHECK(back.events[1].type == LocationCode::kL2L);
}

TEST_CASE("generated session ground truth") {
  Script s;
  s.frames = 300;
  s.events.push_back({LocationCode::kH2L, Hand::kRight, 0, 300, true, 1.5, 0.05});
  const auto g = generate(s);
  CHECK(g.pose.size() == 300);
  CHECK(g.pose.num_keypoints() == 35);
  for (std::size_t t = 0; t < 300; ++t) {
    CHECK(g.truth.timeline.right_hand[t] == LocationCode::kH2L);
    CHECK(g.truth.right_dynamic[t] == 1);
    CHECK(g.truth.left_dynamic[t] == 0);
  }
  CHECK(g.aus.columns.size() == kAuDim);
  CHECK(g.aus.rows.size() == 300);
  CHECK(g.mfcc.rows.size() == static_cast<std::size_t>(std::ceil(300 / 26.0 * 100)));
  CHECK(parse_truth_csv(format_truth_csv(g.truth)) == g.truth);

  const auto dir = testutil::scratch("synth_session");
  write_session(g, dir);
  for (const char* f : {"pose.jsonl", "aus.csv", "gaze.csv", "mfcc.csv", "diarization.csv", "truth.csv", "script.json"})
    CHECK(std::filesystem::exists(dir / f));
  const auto loaded = load_session(dir / "pose.jsonl",
                                   SidecarPaths{dir / "aus.csv", dir / "gaze.csv", dir / "mfcc.csv", dir / "diarization.csv",
                                                kParticipantSpeaker},
                                   synthetic_schema(), 26.0);
  CHECK(loaded.pose.size() == 300);
  REQUIRE(loaded.track("MFCCs") != nullptr);
  CHECK(loaded.track("MFCCs")->length() == 300);
  CHECK(loaded.speaking.speaking.size() == 300);
}

TEST_CASE("benchmark generation is deterministic") {
  BenchmarkConfig cfg;
  cfg.participants = 6;
  cfg.seed = 5;
  cfg.duration_s = 10;
  const auto a = testutil::scratch("bench_a"), b = testutil::scratch("bench_b");
  make_benchmark(cfg, a);
  make_benchmark(cfg, b);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    CHECK(slurp(e.path()) == slurp(b / std::filesystem::relative(e.path(), a)));
  }
  CHECK(files == 3 + 6 * 7);
  const auto corpus = load_corpus(a);
  CHECK(corpus.sessions.size() == 6);
  CHECK(corpus.targets("depression").size() == 6);
  cfg.participants = 5;
  CHECK_THROWS_AS(make_benchmark(cfg, testutil::scratch("bench_c")), ConfigError);
}

TEST_CASE("run config validation") {
  auto c = RunConfig::from_json_text(R"({"seed": 3, "K": 4})");
  CHECK(c.seed() == 3);
  CHECK(c.get_int("K") == 4);
  try {
    RunConfig::from_json_text(R"({"seed": 3, "bogus_key": 1})");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"smoothing": 1.5})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"classifier": "svm"})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"groups": ["Fidget", "Fidget_pure"]})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"K": "four"})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text("{}").seed(), ConfigError);

  auto d = RunConfig::from_json_text(R"({"K": 4, "seed": 3})");
  CHECK(d.hash() == c.hash());
  d.apply_override("K=8");
  CHECK(d.get_int("K") == 8);
  CHECK(d.hash() != c.hash());
  CHECK_THROWS_AS(d.apply_override("K"), ConfigError);
  d.set("out", "/tmp/x");
  d.apply_override("K=4");
  CHECK(d.hash() == c.hash());
  CHECK(fusion_config(c).gmm.components == 4);
  CHECK(exit_code_for(ConfigError("x")) == ExitCode::kConfig);
  CHECK(exit_code_for(ModelError("x")) == ExitCode::kModel);
  CHECK(exit_code_for(DataError("x")) == ExitCode::kData);
}
