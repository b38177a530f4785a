#include "fidget/config.hpp"
#include "fidget/corpus.hpp"
#include "fidget/errors.hpp"
#include "fidget/log.hpp"
#include "fidget/pipeline.hpp"
#include "fidget/synth.hpp"
#include "fidget/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace fidget;

namespace {

constexpr const char* kVersion = "1.0.0";

// Command-line flag -> config key. Flags override the config file.
struct Flag {
  const char* flag;
  const char* key;
  const char* help;
};

const std::vector<Flag>& flags() {
  static const std::vector<Flag> f = {
      {"--corpus", "corpus", "corpus directory or corpus.json"},
      {"--out", "out", "output directory"},
      {"--seed", "seed", "random seed"},
      {"--pose", "pose", "pose file of a single session"},
      {"--schema", "schema", "keypoint schema JSON"},
      {"--aus", "aus", "AU sidecar CSV"},
      {"--gaze", "gaze", "gaze sidecar CSV"},
      {"--mfcc", "mfcc", "MFCC sidecar CSV"},
      {"--diarization", "diarization", "diarization CSV"},
      {"--participant-speaker", "participant_speaker", "speaker id of the participant"},
      {"--fps", "fps", "video frame rate"},
      {"--motion-model", "motion_model", "motion classifier file"},
      {"--model", "model", "fusion model bundle directory"},
      {"--participants", "participants", "synthetic participants"},
      {"--script", "script", "synthetic session script (JSON)"},
      {"--folds", "folds", "cross-validation folds"},
      {"--target", "target", "depression or anxiety"},
  };
  return f;
}

fs::path out_dir(const RunConfig& c, const std::string& command) {
  c.require("out", command);
  const fs::path p = *c.path("out");
  fs::create_directories(p);
  return p;
}

// The corpus, or a one-session corpus built from --pose and friends.
Corpus inputs(const RunConfig& c, const std::string& command) {
  if (auto p = c.path("corpus")) return load_corpus(*p);
  if (!c.path("pose")) throw ConfigError("config key 'corpus' or 'pose' is required for " + command);
  c.require("schema", command);
  Corpus corpus;
  corpus.fps = c.get_double("fps");
  corpus.schema = KeypointSchema::from_json_file(*c.path("schema"), 0);
  SessionSource s;
  s.pose = *c.path("pose");
  s.id = s.pose.parent_path().filename().string();
  if (s.id.empty()) s.id = "session";
  const auto opt = [&c](const char* key) -> std::optional<fs::path> {
    if (auto p = c.path(key)) return fs::path(*p);
    return std::nullopt;
  };
  s.sidecars.aus = opt("aus");
  s.sidecars.gaze = opt("gaze");
  s.sidecars.mfcc = opt("mfcc");
  s.sidecars.diarization = opt("diarization");
  s.sidecars.participant_speaker = c.get_string("participant_speaker");
  corpus.root = s.pose.parent_path();
  corpus.sessions.push_back(std::move(s));
  return corpus;
}

std::map<std::string, std::string> input_hashes(const RunConfig& c, const Corpus* corpus) {
  std::map<std::string, std::string> h;
  if (corpus && c.path("corpus")) {
    for (const auto& [k, v] : corpus->file_hashes()) h["corpus/" + k] = v;
  } else {
    for (const char* key : {"pose", "schema", "aus", "gaze", "mfcc", "diarization", "script"})
      if (auto p = c.path(key)) h[key] = file_hash(*p);
  }
  if (auto p = c.path("motion_model"); p && fs::exists(*p)) h["motion_model"] = file_hash(*p);
  if (auto p = c.path("model"); p && fs::is_directory(*p))
    for (const char* f : {"ddae.json", "gmm.json", "selection.json", "classifier.json"})
      if (fs::exists(fs::path(*p) / f)) h[std::string("model/") + f] = file_hash(fs::path(*p) / f);
  return h;
}

void write_manifest(const fs::path& out, const std::string& command, const RunConfig& c, const Corpus* corpus,
                    const std::map<std::string, std::string>& outputs = {}) {
  nlohmann::ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = c.resolved();
  m["config_hash"] = c.hash();
  m["inputs"] = input_hashes(c, corpus);
  nlohmann::ordered_json o = nlohmann::ordered_json::object();
  for (const auto& [k, v] : outputs) o[k] = v;
  m["outputs"] = o;
  write_file(out / "manifest.json", m.dump(2) + "\n");
}

ActionModelSet load_motion_model(const RunConfig& c, const std::string& command) {
  const auto p = c.path("motion_model");
  if (!p) throw ModelError(command + " needs a motion model (config key 'motion_model')");
  if (!fs::exists(*p)) throw ModelError("motion model " + *p + " does not exist");
  return ActionModelSet::load(*p);
}

// Loads the motion model when configured, otherwise fits one on the ground
// truth of every session.
ActionModelSet motion_models(const RunConfig& c, const std::vector<ProcessedSession>& sessions,
                             const PipelineOptions& opt) {
  if (c.path("motion_model")) return load_motion_model(c, "this command");
  bool any_truth = false;
  for (const auto& s : sessions) any_truth = any_truth || s.truth.has_value();
  if (!any_truth) throw ModelError("no motion model configured and no ground truth to fit one");
  ActionTrainConfig ac = opt.action;
  ac.seed = c.seed();
  return fit_action_models(sessions, nullptr, ac);
}

std::string gestures_csv(const std::vector<ProcessedSession>& sessions) {
  std::ostringstream out;
  out << "session";
  for (const auto& n : GestureFeatureVector::names()) out << ',' << n;
  out << '\n';
  for (const auto& s : sessions) {
    out << s.id;
    for (double v : s.gestures.values) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

TimedTable track_table(const FeatureTrack& t, double fps) {
  TimedTable tab;
  tab.columns = t.columns;
  if (tab.columns.empty())
    for (Eigen::Index d = 0; d < t.dim(); ++d) tab.columns.push_back(t.name + "_" + std::to_string(d));
  for (Eigen::Index i = 0; i < t.length(); ++i) {
    tab.timestamps.push_back(static_cast<double>(i) / fps);
    std::vector<double> row(static_cast<std::size_t>(t.dim()));
    for (Eigen::Index d = 0; d < t.dim(); ++d) row[static_cast<std::size_t>(d)] = t.values(d, i);
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

int run(const std::string& command, const RunConfig& c) {
  if (command == "synth") {
    const fs::path out = out_dir(c, command);
    c.seed();
    if (auto script = c.path("script")) {
      Script s = parse_script(read_file(*script), *script);
      const auto session = generate(s);
      write_session(session, out);
      write_file(out / "schema.json", synthetic_schema().to_json() + "\n");
    } else {
      make_benchmark(benchmark_config(c), out);
    }
    write_manifest(out, command, c, nullptr);
    return 0;
  }

  const Corpus corpus = inputs(c, command);
  const PipelineOptions opt = pipeline_options(c);
  const fs::path out = out_dir(c, command);
  std::map<std::string, std::string> outputs;
  const auto emit = [&](const fs::path& rel, const std::string& text) {
    write_file(out / rel, text);
    outputs[rel.generic_string()] = hex64(fnv1a(text));
  };

  if (command == "ingest") {
    for (const auto& src : corpus.sessions) {
      const Session s = load_session(src.pose, src.sidecars, corpus.schema, corpus.fps);
      const PoseSequence pre = preprocess(s.pose);
      fs::create_directories(out / src.id);
      emit(fs::path(src.id) / "pose_preprocessed.jsonl", format_pose(pre));
      for (const auto& t : s.tracks)
        emit(fs::path(src.id) / (t.name + ".csv"), format_timed_csv(track_table(t, corpus.fps)));
      std::string speaking = "frame,speaking\n";
      for (std::size_t i = 0; i < s.speaking.speaking.size(); ++i)
        speaking += std::to_string(i) + ',' + std::to_string(s.speaking.speaking[i]) + '\n';
      emit(fs::path(src.id) / "speaking.csv", speaking);
      nlohmann::ordered_json sum;
      sum["frames"] = s.pose.size();
      sum["keypoints"] = s.pose.num_keypoints();
      std::size_t missing = 0;
      for (const auto& f : s.pose.frames)
        for (const auto& p : f.points) missing += p.missing() ? 1 : 0;
      sum["missing_keypoints"] = missing;
      sum["torso_length"] = torso_length(interpolate_missing(s.pose));
      for (const auto& t : s.tracks) sum["tracks"][t.name] = t.dim();
      emit(fs::path(src.id) / "summary.json", sum.dump(2) + "\n");
    }
  } else if (command == "gesture-stats") {
    emit("gestures.csv", gestures_csv(process_corpus(corpus, opt)));
  } else if (command == "detect-adaptors") {
    const auto sessions = process_corpus(corpus, opt);
    nlohmann::ordered_json det = nlohmann::ordered_json::object();
    for (const auto& s : sessions) {
      fs::create_directories(out / s.id);
      emit(fs::path(s.id) / "timeline.csv", format_timeline_csv(s.timeline));
      if (s.truth) {
        const auto d = detection_score(s.timeline, s.truth->timeline);
        det[s.id] = {{"precision", d.total.precision()}, {"recall", d.total.recall()}};
      }
    }
    if (!det.empty()) emit("detection.json", det.dump(2) + "\n");
  } else if (command == "classify-motion") {
    const auto sessions = process_corpus(corpus, opt);
    if (c.has("motion_model") && !fs::exists(*c.path("motion_model"))) {
      load_motion_model(c, command);  // throws
    }
    ActionModelSet models;
    if (c.path("motion_model")) {
      models = load_motion_model(c, command);
    } else {
      c.seed();
      ActionTrainConfig ac = opt.action;
      ac.seed = c.seed();
      models = fit_action_models(sessions, nullptr, ac);
      if (models.size() == 0) throw DataError("no category has labelled slices of both classes");
      models.save(out / "motion_model.bin");
      outputs["motion_model.bin"] = file_hash(out / "motion_model.bin");
    }
    std::string csv = "session,category,window_start,label,score\n";
    for (const auto& s : sessions) {
      std::vector<double> scores;
      const auto actions = classify_slices(s, models, &scores);
      for (std::size_t i = 0; i < actions.size(); ++i)
        csv += s.id + ',' + to_string(actions[i].category) + ',' + std::to_string(actions[i].start) + ',' +
               to_string(actions[i].label) + ',' + format_fixed(scores[i], 6) + '\n';
    }
    emit("slices.csv", csv);
  } else if (command == "encode-fidgets") {
    const ActionModelSet models = load_motion_model(c, command);
    const auto sessions = process_corpus(corpus, opt);
    for (const auto& s : sessions) {
      fs::create_directories(out / s.id);
      const bool speaking = corpus.sessions.front().sidecars.diarization.has_value();
      emit(fs::path(s.id) / "fidgets.csv", format_fidget_csv(session_fidgets(s, models, speaking)));
    }
  } else if (command == "train-fusion") {
    c.seed();
    const auto sessions = process_corpus(corpus, opt);
    const FusionConfig fc = fusion_config(c);
    const ActionModelSet models = motion_models(c, sessions, opt);
    std::vector<SessionFrames> frames;
    for (const auto& s : sessions) frames.push_back(build_frames(s, models, fc.groups));
    const FusionModel model = train_fusion(frames, corpus.targets(c.get_string("target")), fc);
    model.save(out);
    models.save(out / "motion_model.bin");
    for (const char* f : {"ddae.json", "gmm.json", "selection.json", "classifier.json", "motion_model.bin"})
      outputs[f] = file_hash(out / f);
  } else if (command == "evaluate") {
    c.seed();
    const auto sessions = process_corpus(corpus, opt);
    const auto report = evaluate_corpus(corpus, sessions, c);
    emit("metrics.json", report.to_json().dump(2) + "\n");
  } else if (command == "analyze") {
    c.seed();
    const auto sessions = process_corpus(corpus, opt);
    const auto models = motion_models(c, sessions, opt);
    const auto report = analyze_corpus(corpus, sessions, models, c);
    emit("analysis.json", report.to_json().dump(2) + "\n");
    emit("polarity.txt", format_polarity(report.polarity) + "\n");
    emit("search_log.csv", report.search_log_csv(static_cast<std::size_t>(c.get_int("search_log_limit"))));
  } else {
    throw ConfigError("unknown command " + command);
  }
  write_manifest(out, command, c, &corpus, outputs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-adaptor, fidget and distress analysis of pose keypoint sessions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--set", overrides, "override a config key: key=value (repeatable)");
  app.add_flag("--quiet", quiet, "only log warnings and errors");

  static const std::vector<std::pair<std::string, std::string>> commands = {
      {"synth", "write a synthetic benchmark corpus or one scripted session"},
      {"ingest", "load, align and preprocess sessions"},
      {"gesture-stats", "body-gesture statistics per session"},
      {"detect-adaptors", "self-adaptor location timelines"},
      {"classify-motion", "train (--train) or apply the DYNAMIC/STATIC slice classifier"},
      {"encode-fidgets", "per-frame fidget matrices"},
      {"train-fusion", "fit the fusion model bundle"},
      {"evaluate", "participant-independent evaluation with leak audit"},
      {"analyze", "linear analysis, polarity report and feature search"},
  };
  std::map<std::string, std::string> flag_values;
  bool train_flag = false;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    for (const auto& f : flags()) sub->add_option(f.flag, flag_values[f.key], f.help);
    if (name == "classify-motion") sub->add_flag("--train", train_flag, "fit a new model on ground-truth slices");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }
  if (quiet) {
    set_log_sink([](LogLevel level, std::string_view msg) {
      if (level >= LogLevel::kWarning) std::cerr << "[warning] " << msg << '\n';
    });
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig config = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    for (const auto& o : overrides) config.apply_override(o);
    for (const auto& f : flags()) {
      const auto& v = flag_values[f.key];
      if (!v.empty()) config.apply_override(std::string(f.key) + "=" + v);
    }
    if (command == "classify-motion" && train_flag && config.has("motion_model"))
      throw ConfigError("classify-motion: --train and --motion-model are exclusive");
    if (command == "classify-motion" && !train_flag && !config.has("motion_model"))
      throw ModelError("classify-motion: inference needs a motion model (config key 'motion_model'); use --train to fit one");
    return run(command, config);
  } catch (const LeakError& e) {
    log(LogLevel::kError, std::string("leak detected: ") + e.what());
    return static_cast<int>(ExitCode::kData);
  } catch (const std::exception& e) {
    log(LogLevel::kError, e.what());
    return static_cast<int>(exit_code_for(e));
  }
}
