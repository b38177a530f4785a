// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//
// usage: acceptance <work-dir>

#include "oracles.hpp"

#include "fidget/config.hpp"
#include "fidget/corpus.hpp"
#include "fidget/ddae.hpp"
#include "fidget/distress.hpp"
#include "fidget/errors.hpp"
#include "fidget/fisher.hpp"
#include "fidget/fusion.hpp"
#include "fidget/gestures.hpp"
#include "fidget/ingest.hpp"
#include "fidget/log.hpp"
#include "fidget/motion.hpp"
#include "fidget/pipeline.hpp"
#include "fidget/random.hpp"
#include "fidget/signal.hpp"
#include "fidget/synth.hpp"
#include "fidget/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace fidget;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

Eigen::MatrixXd normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

Outcome surprise_arithmetic() {
  Outcome o;
  const double two = gesture_surprise(0.8, 2), hundred = gesture_surprise(0.8, 100);
  o.require(rel_close(two, 0.4, 1e-15), "2 gestures, 80% free -> " + fmt(two * 100, 6) + "%");
  o.require(rel_close(hundred, 0.008, 1e-15), "100 gestures, 80% free -> " + fmt(hundred * 100, 6) + "%");
  return o;
}

Outcome smoothing_and_spline() {
  Outcome o;
  Rng rng(2);
  double worst = 0.0;
  for (int degree = 0; degree <= 3; ++degree) {
    std::vector<double> c(4, 0.0);
    for (int p = 0; p <= degree; ++p) c[static_cast<std::size_t>(p)] = rng.uniform(-2, 2);
    std::vector<double> y(80);
    for (std::size_t t = 0; t < y.size(); ++t) {
      const double x = static_cast<double>(t) / 10.0;
      y[t] = c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
    }
    const auto s = savgol_filter(y, 11, 3);
    for (std::size_t t = 5; t + 5 < y.size(); ++t) worst = std::max(worst, std::abs(s[t] - y[t]));
  }
  o.require(worst < 1e-9, "SG(11,3) max interior error on degree<=3 " + fmt(worst, 3));

  // Deleted sample of a cubic track inside a pose sequence.
  Script script;
  script.frames = 20;
  script.jitter = 0.0;
  auto seq = generate(script).pose;
  const auto cubic = [](double t) { return 300.0 + 4.0 * t - 0.3 * t * t + 0.02 * t * t * t; };
  for (auto& f : seq.frames) f.points[4].y = cubic(f.t);
  seq.frames[9].points[4] = {kNaN, kNaN, 0.0};
  const double err = std::abs(interpolate_missing(seq).frames[9].points[4].y - cubic(9));
  o.require(err < 1e-6, "spline fill error " + fmt(err, 3) + " px");
  return o;
}

Outcome slice_feature_contract() {
  Outcome o;
  const auto grid = band_grid();
  bool spaced = true;
  for (std::size_t k = 0; k < grid.size(); ++k)
    spaced = spaced && std::abs(grid[k] - (0.5 + 0.05 * static_cast<double>(k))) < 1e-12;
  o.require(grid.size() == 41 && spaced && grid.front() == 0.5 && std::abs(grid.back() - 2.5) < 1e-12,
            "grid " + std::to_string(grid.size()) + " points " + fmt(grid.front()) + "-" + fmt(grid.back()) + " Hz");

  std::vector<double> x(100);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2 * std::numbers::pi * static_cast<double>(t) / 26.0);
  TrajectorySlice slice;
  slice.trajectories.resize(1, 100);
  for (std::size_t t = 0; t < x.size(); ++t) slice.trajectories(0, static_cast<Eigen::Index>(t)) = x[t];
  const auto f = slice_features(slice, 26.0);
  const auto peak = static_cast<std::size_t>(std::max_element(f.fft.begin(), f.fft.end()) - f.fft.begin());
  o.require(std::abs(grid[peak] - 1.0) <= 0.05 + 1e-12, "1 Hz sinusoid peaks at " + fmt(grid[peak]) + " Hz");

  // Bins of a 2600-sample DFT at 26 fps fall every 0.01 Hz; grid point k is bin 50 + 5k.
  const auto ref = oracle::dft_magnitude(x, 2600);
  double worst = 0.0;
  std::size_t ref_peak = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    worst = std::max(worst, std::abs(f.fft[k] - ref[50 + 5 * k]) / std::max(1e-12, ref[50 + 5 * k]));
    if (ref[50 + 5 * k] > ref[50 + 5 * ref_peak]) ref_peak = k;
  }
  o.require(worst < 1e-9 && ref_peak == peak, "direct DFT max relative deviation " + fmt(worst, 3));
  return o;
}

Outcome fisher_vectors() {
  Outcome o;
  Rng rng(4);
  const auto random_gmm = [&rng](int k, int d) {
    GmmModel g;
    g.weights = Eigen::VectorXd(k);
    g.means = Eigen::MatrixXd(k, d);
    g.variances = Eigen::MatrixXd(k, d);
    for (int c = 0; c < k; ++c) {
      g.weights(c) = rng.uniform(0.2, 1.0);
      for (int j = 0; j < d; ++j) {
        g.means(c, j) = rng.uniform(-1.5, 1.5);
        g.variances(c, j) = rng.uniform(0.3, 2.0);
      }
    }
    g.weights /= g.weights.sum();
    return g;
  };
  for (auto [k, d] : std::vector<std::pair<int, int>>{{1, 2}, {16, 8}, {32, 16}}) {
    const auto len = fisher_vector(normal_matrix(rng, 60, d), random_gmm(k, d)).size();
    o.require(len == 2 * k * d, "K=" + std::to_string(k) + " d=" + std::to_string(d) + " length " + std::to_string(len));
  }
  const Eigen::MatrixXd latents = normal_matrix(rng, 50, 4);
  GmmConfig cfg;
  cfg.components = 2;
  cfg.seed = 1;
  const auto gmm = fit_gmm(latents, cfg).model;
  const auto fv = fisher_vector(latents, gmm);
  const auto ref = oracle::fisher_vector(latents, gmm, true);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fv.size(); ++i) worst = std::max(worst, std::abs(fv(i) - ref[static_cast<std::size_t>(i)]));
  o.require(worst < 1e-6, "brute-force max deviation " + fmt(worst, 3));
  o.require(std::abs(fv.norm() - 1.0) < 1e-12, "L2 norm " + fmt(fv.norm(), 15));
  return o;
}

Outcome label_smoothing() {
  Outcome o;
  const std::vector<std::pair<double, double>> expected = {{0.0, 0.0}, {0.2, 0.1}, {0.4, 0.2}};
  for (auto [s, lo] : expected) {
    const auto zero = smooth_label(0, s), one = smooth_label(1, s);
    const bool ok = std::abs(zero[1] - lo) < 1e-15 && std::abs(zero[0] - (1 - lo)) < 1e-15 &&
                    std::abs(one[0] - lo) < 1e-15 && std::abs(one[1] - (1 - lo)) < 1e-15;
    o.require(ok, "s=" + fmt(s) + " -> {" + fmt(one[0]) + ", " + fmt(one[1]) + "}");
  }
  return o;
}

Outcome ddae_checks() {
  Outcome o;
  const auto arch = ddae_architecture({40, 8, 12});
  o.require(arch.encoder_dims == std::vector<int>{20, 4, 6} && arch.latent_dim == 15 &&
                arch.decoder_dims == std::vector<int>{20, 4, 6},
            "widths {40,8,12} -> encoders {20,4,6}, latent " + std::to_string(arch.latent_dim));

  DdaeModel toy({{"a", 3, 0.35}, {"b", 4, 0.1}}, 11);
  Rng rng(6);
  const GroupFrames in = {normal_matrix(rng, 5, 3), normal_matrix(rng, 5, 4)};
  const GroupFrames target = {normal_matrix(rng, 5, 3), normal_matrix(rng, 5, 4)};
  std::vector<double> grad;
  toy.loss(in, target, &grad);
  auto p = toy.parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i], h = 1e-6;
    p[i] = keep + h;
    toy.set_parameters(p);
    const double up = toy.loss(in, target);
    p[i] = keep - h;
    toy.set_parameters(p);
    const double down = toy.loss(in, target);
    p[i] = keep;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(numeric - grad[i]) / std::max({std::abs(numeric), std::abs(grad[i]), 1e-3}));
  }
  o.require(worst < 1e-4, "gradient check over " + std::to_string(p.size()) + " parameters, max rel " + fmt(worst, 3));

  const Eigen::MatrixXd base = normal_matrix(rng, 1000, 3);
  const Eigen::MatrixXd fid = base * normal_matrix(rng, 3, 9) + 0.2 * normal_matrix(rng, 1000, 9);
  const Eigen::MatrixXd aus = base * normal_matrix(rng, 3, 35) + 0.2 * normal_matrix(rng, 1000, 35);
  DdaeConfig cfg;
  cfg.max_epochs = 20;
  cfg.seed = 2;
  DdaeHistory hist;
  train_ddae({{"Fidget", 9, 0.35}, {"AUs", 35, 0.1}}, {fid, aus}, cfg, &hist);
  o.require(hist.final_loss < hist.initial_loss,
            "1000 frames weighted MSE " + fmt(hist.initial_loss) + " -> " + fmt(hist.final_loss));
  return o;
}

Outcome krippendorff() {
  Outcome o;
  const std::vector<int> labels = {0, 1, 2, 2, 1, 0, 1, 1};
  const auto same = krippendorff_alpha(labels, labels, {0, 1, 2});
  o.require(!same.degenerate && same.alpha == 1.0, "perfect agreement alpha " + fmt(same.alpha, 17));
  Rng rng(9);
  std::vector<int> a(10000), b(10000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<int>(rng.index(4));
    b[i] = static_cast<int>(rng.index(4));
  }
  const double r = krippendorff_alpha(a, b, {0, 1, 2, 3}).alpha;
  o.require(std::abs(r) < 0.05, "independent labels N=10000 alpha " + fmt(r, 3));
  return o;
}

// Benchmark runs shared by the pipeline-level criteria.
struct BenchmarkRun {
  EvaluationReport report;
  std::string metrics;
};

RunConfig benchmark_config_for(const fs::path& corpus) {
  auto c = RunConfig::from_json_text(R"({"seed": 7, "participants": 12})");
  c.set("corpus", corpus.string());
  return c;
}

BenchmarkRun run_benchmark(const fs::path& work, const std::string& tag) {
  const fs::path corpus_dir = work / ("corpus_" + tag);
  fs::remove_all(corpus_dir);
  const auto config = benchmark_config_for(corpus_dir);
  make_benchmark(fidget::benchmark_config(config), corpus_dir);
  const auto corpus = load_corpus(corpus_dir);
  const auto sessions = process_corpus(corpus, pipeline_options(config));
  BenchmarkRun run{evaluate_corpus(corpus, sessions, config), ""};
  run.metrics = run.report.to_json().dump(2);
  std::ofstream(work / ("metrics_" + tag + ".json"), std::ios::binary) << run.metrics;
  return run;
}

Outcome pipeline_properties(const BenchmarkRun& run) {
  Outcome o;
  const auto& r = run.report;
  o.require(r.detection.total.precision() >= 0.9, "adaptor precision " + fmt(r.detection.total.precision()));
  o.require(r.detection.total.recall() >= 0.9, "adaptor recall " + fmt(r.detection.total.recall()));
  bool five_fold = !r.motion.empty();
  for (const auto& m : r.motion) five_fold = five_fold && m.cv && m.cv->fold_accuracy.size() == 5;
  o.require(five_fold && r.motion_accuracy >= 0.9, "DYNAMIC/STATIC 5-fold accuracy " + fmt(r.motion_accuracy));
  o.require(r.fusion.folds.size() == 3 && r.fusion.f1_mean >= 0.9, "fusion 3-fold F1 " + fmt(r.fusion.f1_mean));
  o.require(r.permutation.size() == 20 && r.permutation_mean >= 0.3 && r.permutation_mean <= 0.7,
            "shuffled-label mean F1 " + fmt(r.permutation_mean) + " over " + std::to_string(r.permutation.size()));
  return o;
}

Outcome no_leak(const BenchmarkRun& run) {
  Outcome o;
  const std::vector<std::string> stages = {"action", "ddae", "gmm", "rf_selection", "classifier"};
  std::size_t audited = 0;
  bool clean = true;
  for (const auto& f : run.report.fusion.folds) {
    audited += f.leak_checked;
    for (const auto& stage : stages) {
      const auto it = f.provenance.find(stage);
      if (it == f.provenance.end() || it->second.empty()) {
        clean = false;
        continue;
      }
      for (const auto& id : f.test_participants) clean = clean && !it->second.count(id);
    }
  }
  o.require(run.report.leak_checked && audited == run.report.fusion.folds.size(),
            std::to_string(audited) + " CV folds audited");
  o.require(clean, "action/ddae/gmm/rf_selection/classifier never saw a test participant");

  // The audit must reject a stage that consumed a held-out participant.
  std::map<std::string, int> labels;
  for (int p = 0; p < 6; ++p) labels["S" + std::to_string(p)] = p % 2;
  FusionConfig cfg;
  cfg.groups = {"Gaze"};
  cfg.gmm.components = 2;
  cfg.ddae.max_epochs = 2;
  cfg.rf_num = 4;
  cfg.classifier = DistressKind::kLogistic;
  const FrameProvider leaky = [&labels](const std::vector<std::string>&, Provenance& prov) {
    std::vector<SessionFrames> out;
    std::vector<std::string> everyone;
    Rng rng(3);
    for (const auto& [id, y] : labels) {
      out.push_back({id, {normal_matrix(rng, 40, 8) * (1.0 + y)}});
      everyone.push_back(id);
    }
    prov.record("action", everyone);
    return out;
  };
  bool raised = false;
  try {
    cross_validate(labels, leaky, cfg);
  } catch (const LeakError&) {
    raised = true;
  }
  o.require(raised, "planted leak raises LeakError");
  return o;
}

Outcome determinism(const BenchmarkRun& a, const BenchmarkRun& b) {
  Outcome o;
  o.require(!a.metrics.empty() && a.metrics == b.metrics,
            "metrics files " + std::to_string(a.metrics.size()) + " and " + std::to_string(b.metrics.size()) +
                " bytes, identical=" + (a.metrics == b.metrics ? "yes" : "no"));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "fidget_acceptance";
  fs::create_directories(work);
  set_log_sink([](LogLevel level, std::string_view m) {
    if (level >= LogLevel::kWarning) std::cerr << "[warn] " << m << "\n";
  });

  std::optional<BenchmarkRun> first, second;
  std::string bench_error;
  const auto benchmark = [&]() -> const BenchmarkRun& {
    if (!first && bench_error.empty()) {
      try {
        first = run_benchmark(work, "a");
      } catch (const std::exception& e) {
        bench_error = e.what();
      }
    }
    if (!first) throw std::runtime_error("benchmark run failed: " + bench_error);
    return *first;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gesture surprise arithmetic", surprise_arithmetic},
      {"Savitzky-Golay and spline fill", smoothing_and_spline},
      {"slice feature contract", slice_feature_contract},
      {"Fisher vector", fisher_vectors},
      {"label smoothing", label_smoothing},
      {"DDAE", ddae_checks},
      {"synthetic benchmark properties", [&] { return pipeline_properties(benchmark()); }},
      {"no-leak invariant", [&] { return no_leak(benchmark()); }},
      {"Krippendorff alpha", krippendorff},
      {"determinism",
       [&] {
         const auto& a = benchmark();
         second = run_benchmark(work, "b");
         return determinism(a, *second);
       }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s (%.1f s): %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
