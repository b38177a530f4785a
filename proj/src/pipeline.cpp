#include "fidget/pipeline.hpp"

#include "fidget/errors.hpp"
#include "fidget/log.hpp"
#include "fidget/random.hpp"
#include "fidget/text.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace fidget {

PipelineOptions pipeline_options(const RunConfig& config) {
  PipelineOptions o;
  o.adaptors = adaptor_config(config);
  o.adaptors.reference_fps = 26.0;
  o.slices = slice_config(config);
  o.gestures = gesture_config(config);
  o.action = action_config(config);
  return o;
}

ProcessedSession process_session(const SessionSource& source, const KeypointSchema& schema, double fps,
                                 const PipelineOptions& options) {
  ProcessedSession s;
  s.id = source.id;
  s.raw = load_session(source.pose, source.sidecars, schema, fps);
  s.pose = preprocess(s.raw.pose);
  s.timeline = detect_locations(s.pose, options.adaptors);
  for (const auto& slice : slice_sessions(s.pose, s.timeline, options.slices)) {
    s.slices.push_back({slice.category, slice.code, slice.start, slice.length()});
    s.features.push_back(slice_features(slice, fps));
  }
  s.gestures = body_gesture_features(s.pose, options.gestures);
  if (source.truth) {
    s.truth = parse_truth_csv(read_file(*source.truth), source.truth->string());
    if (s.truth->timeline.size() != s.pose.size())
      throw DataError(source.truth->string() + ": " + std::to_string(s.truth->timeline.size()) +
                      " frames, pose has " + std::to_string(s.pose.size()));
  }
  for (const auto& info : s.slices) s.slice_truth.push_back(s.truth ? slice_truth_label(*s.truth, info) : -1);
  return s;
}

std::vector<ProcessedSession> process_corpus(const Corpus& corpus, const PipelineOptions& options) {
  std::vector<ProcessedSession> out;
  for (const auto& src : corpus.sessions) {
    try {
      out.push_back(process_session(src, corpus.schema, corpus.fps, options));
    } catch (const DataError& e) {
      throw DataError("session " + src.id + ": " + e.what());
    }
  }
  return out;
}

int slice_truth_label(const GroundTruth& truth, const SliceInfo& slice) {
  const std::vector<std::uint8_t>* channel = &truth.left_dynamic;
  if (slice.category == SliceCategory::kRight) channel = &truth.right_dynamic;
  if (slice.category == SliceCategory::kLeg) channel = &truth.leg_dynamic;
  std::size_t moving = 0;
  for (std::size_t t = slice.start; t < slice.start + slice.length && t < channel->size(); ++t) moving += (*channel)[t];
  return 2 * moving >= slice.length ? 1 : 0;
}

ActionModelSet fit_action_models(const std::vector<ProcessedSession>& sessions,
                                 const std::set<std::string>* participants, const ActionTrainConfig& config) {
  ActionModelSet set;
  for (SliceCategory cat : kSliceCategories) {
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<int> labels;
    for (const auto& s : sessions) {
      if (participants && !participants->count(s.id)) continue;
      for (std::size_t i = 0; i < s.slices.size(); ++i) {
        if (s.slices[i].category != cat || s.slice_truth[i] < 0) continue;
        rows.push_back(s.features[i].flatten());
        labels.push_back(s.slice_truth[i]);
      }
    }
    const std::set<int> classes(labels.begin(), labels.end());
    if (classes.size() < 2) {
      log_warning(std::string("motion category ") + to_string(cat) + ": " + std::to_string(labels.size()) +
                  " labelled slices with fewer than two classes, no model");
      continue;
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rows[i];
    ActionTrainConfig c = config;
    c.seed = mix_seed(config.seed, 500 + static_cast<std::uint64_t>(cat));
    set.set(ActionClassifier::train(cat, x, labels, c));
  }
  return set;
}

std::vector<SliceAction> classify_slices(const ProcessedSession& session, const ActionModelSet& models,
                                         std::vector<double>* scores) {
  std::vector<SliceAction> out;
  for (std::size_t i = 0; i < session.slices.size(); ++i) {
    const auto& info = session.slices[i];
    SliceAction a{info.category, info.start, info.length, ActionLabel::kStatic};
    double score = 0.0;
    if (const auto* m = models.get(info.category)) {
      score = m->score(session.features[i].flatten());
      a.label = score >= 0.5 ? ActionLabel::kDynamic : ActionLabel::kStatic;
    }
    if (scores) scores->push_back(score);
    out.push_back(a);
  }
  return out;
}

FidgetMatrix session_fidgets(const ProcessedSession& session, const ActionModelSet& models, bool speaking) {
  FidgetMatrix m = encode_fidgets(session.timeline, classify_slices(session, models));
  if (speaking) m = attach_speaking(m, session.raw.speaking);
  return m;
}

SessionFrames build_frames(const ProcessedSession& session, const ActionModelSet& models,
                           const std::vector<std::string>& groups) {
  SessionFrames f;
  f.participant = session.id;
  const auto n = static_cast<Eigen::Index>(session.pose.size());
  std::optional<FidgetMatrix> fidgets;
  for (const auto& g : groups) {
    if (g == "Fidget" || g == "Fidget_pure") {
      if (!fidgets) fidgets = session_fidgets(session, models, g == "Fidget");
      Eigen::MatrixXd m(n, static_cast<Eigen::Index>(fidgets->row_count()));
      for (std::size_t r = 0; r < fidgets->row_count(); ++r)
        for (Eigen::Index t = 0; t < n; ++t)
          m(t, static_cast<Eigen::Index>(r)) = fidgets->rows[r][static_cast<std::size_t>(t)];
      f.groups.push_back(std::move(m));
      continue;
    }
    const FeatureTrack* track = session.raw.track(g);
    if (!track) throw DataError("session " + session.id + " has no " + g + " track");
    f.groups.push_back(fill_track_gaps(*track).values.transpose());
  }
  return f;
}

DetectionScore detection_score(const LocationTimeline& detected, const LocationTimeline& truth) {
  if (detected.size() != truth.size()) throw DataError("timeline lengths differ");
  DetectionScore s;
  const auto tally = [](DetectionCounts& c, LocationCode d, LocationCode t, LocationCode negative) {
    const bool pd = d != negative, pt = t != negative;
    if (pd && d == t) ++c.tp;
    if (pd && d != t) ++c.fp;
    if (pt && d != t) ++c.fn;
  };
  for (std::size_t i = 0; i < truth.size(); ++i) {
    tally(s.hands, detected.left_hand[i], truth.left_hand[i], LocationCode::kHF);
    tally(s.hands, detected.right_hand[i], truth.right_hand[i], LocationCode::kHF);
    tally(s.legs, detected.legs[i], truth.legs[i], LocationCode::kL2G);
  }
  s.total = {s.hands.tp + s.legs.tp, s.hands.fp + s.legs.fp, s.hands.fn + s.legs.fn};
  return s;
}

namespace {

nlohmann::ordered_json counts_json(const DetectionCounts& c) {
  nlohmann::ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["precision"] = c.precision();
  j["recall"] = c.recall();
  return j;
}

// Fixed precision keeps the metric files stable and readable.
double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::vector<double> rounded(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(round6(x));
  return out;
}

}  // namespace

nlohmann::ordered_json EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  auto& d = j["adaptors"];
  d["hands"] = counts_json(detection.hands);
  d["legs"] = counts_json(detection.legs);
  d["precision"] = round6(detection.total.precision());
  d["recall"] = round6(detection.total.recall());
  auto& m = j["motion"];
  m["categories"] = nlohmann::ordered_json::array();
  for (const auto& c : motion) {
    nlohmann::ordered_json e;
    e["category"] = to_string(c.category);
    e["slices"] = c.slices;
    e["dynamic"] = c.dynamic;
    if (c.cv) {
      e["accuracy_mean"] = round6(c.cv->accuracy_mean);
      e["accuracy_std"] = round6(c.cv->accuracy_std);
      e["f1_mean"] = round6(c.cv->f1_mean);
      e["fold_accuracy"] = rounded(c.cv->fold_accuracy);
    } else {
      e["skipped"] = c.skipped;
    }
    m["categories"].push_back(std::move(e));
  }
  m["accuracy"] = round6(motion_accuracy);
  m["f1"] = round6(motion_f1);
  auto& f = j["fusion"];
  f["f1_mean"] = round6(fusion.f1_mean);
  f["f1_std"] = round6(fusion.f1_std);
  f["leak_checked"] = leak_checked;
  f["folds"] = nlohmann::ordered_json::array();
  for (const auto& r : fusion.folds) {
    nlohmann::ordered_json e;
    e["test"] = r.test_participants;
    e["train"] = r.train_participants;
    e["truth"] = r.truth;
    e["predicted"] = r.predicted;
    e["scores"] = rounded(r.scores);
    e["f1"] = round6(r.f1);
    e["accuracy"] = round6(r.accuracy);
    nlohmann::ordered_json prov;
    for (const auto& [stage, ids] : r.provenance) prov[stage] = std::vector<std::string>(ids.begin(), ids.end());
    e["provenance"] = prov;
    f["folds"].push_back(std::move(e));
  }
  auto& p = j["permutation"];
  p["shuffles"] = permutation.size();
  p["f1"] = rounded(permutation);
  p["f1_mean"] = round6(permutation_mean);
  return j;
}

EvaluationReport evaluate_corpus(const Corpus& corpus, const std::vector<ProcessedSession>& sessions,
                                 const RunConfig& config) {
  const PipelineOptions options = pipeline_options(config);
  EvaluationReport rep;

  for (const auto& s : sessions) {
    if (!s.truth) continue;
    const auto d = detection_score(s.timeline, s.truth->timeline);
    for (auto [dst, src] : {std::pair{&rep.detection.hands, &d.hands}, std::pair{&rep.detection.legs, &d.legs},
                            std::pair{&rep.detection.total, &d.total}}) {
      dst->tp += src->tp;
      dst->fp += src->fp;
      dst->fn += src->fn;
    }
  }
  log_info("adaptor detection: precision " + format_fixed(rep.detection.total.precision(), 4) + ", recall " +
           format_fixed(rep.detection.total.recall(), 4));

  std::size_t weighted_n = 0;
  for (SliceCategory cat : kSliceCategories) {
    MotionCategoryResult r;
    r.category = cat;
    std::vector<SliceFeatures> feats;
    std::vector<int> labels;
    std::vector<std::string> owners;
    for (const auto& s : sessions)
      for (std::size_t i = 0; i < s.slices.size(); ++i)
        if (s.slices[i].category == cat && s.slice_truth[i] >= 0) {
          feats.push_back(s.features[i]);
          labels.push_back(s.slice_truth[i]);
          owners.push_back(s.id);
        }
    r.slices = labels.size();
    r.dynamic = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    try {
      ActionTrainConfig ac = options.action;
      ac.seed = mix_seed(config.seed(), 600 + static_cast<std::uint64_t>(cat));
      r.cv = train_action_classifier(cat, feats, labels, owners, ac).cv;
      rep.motion_accuracy += r.cv->accuracy_mean * static_cast<double>(r.slices);
      rep.motion_f1 += r.cv->f1_mean * static_cast<double>(r.slices);
      weighted_n += r.slices;
      log_info(std::string("motion ") + to_string(cat) + ": " + std::to_string(r.slices) + " slices, accuracy " +
               format_fixed(r.cv->accuracy_mean, 4));
    } catch (const DataError& e) {
      r.skipped = e.what();
      log_warning(std::string("motion ") + to_string(cat) + " skipped: " + e.what());
    }
    rep.motion.push_back(std::move(r));
  }
  if (weighted_n) {
    rep.motion_accuracy /= static_cast<double>(weighted_n);
    rep.motion_f1 /= static_cast<double>(weighted_n);
  }

  const FusionConfig fc = fusion_config(config);
  const auto labels = corpus.targets(config.get_string("target"));
  const bool needs_actions = std::any_of(fc.groups.begin(), fc.groups.end(),
                                         [](const std::string& g) { return g.rfind("Fidget", 0) == 0; });
  const FrameProvider provider = [&](const std::vector<std::string>& train_ids, Provenance& prov) {
    ActionModelSet models;
    if (needs_actions) {
      const std::set<std::string> train(train_ids.begin(), train_ids.end());
      models = fit_action_models(sessions, &train, options.action);
      std::vector<std::string> used;
      for (const auto& s : sessions)
        if (train.count(s.id) && s.truth) used.push_back(s.id);
      prov.record("action", used);
    }
    std::vector<SessionFrames> frames;
    for (const auto& s : sessions) frames.push_back(build_frames(s, models, fc.groups));
    return frames;
  };
  const auto folds = fusion_folds(labels, fc);
  const auto embedded = embed_folds(folds, provider, fc);
  std::vector<FoldReport> reports;
  for (std::size_t f = 0; f < embedded.size(); ++f) reports.push_back(classify_fold(embedded[f], labels, fc, f));
  rep.fusion = summarize(std::move(reports));
  rep.leak_checked = std::all_of(rep.fusion.folds.begin(), rep.fusion.folds.end(),
                                 [](const FoldReport& r) { return r.leak_checked; });
  log_info("fusion: F1 " + format_fixed(rep.fusion.f1_mean, 4) + " +- " + format_fixed(rep.fusion.f1_std, 4));

  const int shuffles = config.get_int("shuffles");
  if (shuffles > 0) {
    rep.permutation = permutation_f1(embedded, labels, fc, shuffles, config.seed());
    rep.permutation_mean = mean_std(rep.permutation).mean;
    log_info("permutation: mean F1 " + format_fixed(rep.permutation_mean, 4) + " over " +
             std::to_string(shuffles) + " shuffles");
  }
  return rep;
}

nlohmann::ordered_json AnalysisReport::to_json() const {
  nlohmann::ordered_json j;
  j["features"] = names;
  j["participants"] = participants;
  j["labels"] = labels;
  auto& lin = j["linear"];
  lin["f1_mean"] = round6(linear.f1_mean);
  lin["f1_std"] = round6(linear.f1_std);
  lin["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : linear.folds) {
    nlohmann::ordered_json e;
    e["f1"] = round6(f.f1);
    e["intercept"] = round6(f.intercept);
    e["coefficients"] = rounded(f.coefficients);
    e["ridge"] = f.ridge;
    lin["folds"].push_back(std::move(e));
  }
  j["polarity"] = format_polarity(polarity);
  auto& s = j["search"];
  s["best"] = search.best_names;
  s["f1_mean"] = round6(search.best.f1_mean);
  s["fold_f1"] = rounded(search.best.fold_f1);
  s["approximate"] = search.approximate;
  s["evaluated"] = search.evaluated;
  return j;
}

std::string AnalysisReport::search_log_csv(std::size_t limit) const {
  std::vector<SubsetScore> rows;
  if (!search.exhaustive_f1.empty()) {
    for (std::size_t mask = 1; mask < search.exhaustive_f1.size(); ++mask) {
      SubsetScore s;
      for (int b = 0; b < 32; ++b)
        if (mask & (std::size_t{1} << b)) s.features.push_back(b);
      s.f1_mean = search.exhaustive_f1[mask];
      rows.push_back(std::move(s));
    }
  } else {
    rows = search.log;
  }
  const std::size_t keep = std::min(limit, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(keep), rows.end(), better_subset);
  std::ostringstream out;
  out << "rank,size,f1_mean,features\n";
  for (std::size_t i = 0; i < keep; ++i) {
    out << i + 1 << ',' << rows[i].features.size() << ',' << format_fixed(rows[i].f1_mean, 6) << ',';
    for (std::size_t k = 0; k < rows[i].features.size(); ++k)
      out << (k ? " " : "") << names[static_cast<std::size_t>(rows[i].features[k])];
    out << '\n';
  }
  return out.str();
}

AnalysisReport analyze_corpus(const Corpus& corpus, const std::vector<ProcessedSession>& sessions,
                              const ActionModelSet& models, const RunConfig& config) {
  AnalysisReport rep;
  const std::string which = config.get_string("analysis_features");
  const bool gesture = which != "fidget", fidget = which != "gesture";
  if (gesture)
    for (const auto& n : GestureFeatureVector::names()) rep.names.push_back(n);
  if (fidget)
    for (std::size_t r = 0; r < kPureFidgetRows; ++r) rep.names.push_back(fidget_row_names()[r]);
  const auto targets = corpus.targets(config.get_string("target"));
  rep.features.resize(static_cast<Eigen::Index>(sessions.size()), static_cast<Eigen::Index>(rep.names.size()));
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto& s = sessions[i];
    std::vector<double> row;
    if (gesture) row.insert(row.end(), s.gestures.values.begin(), s.gestures.values.end());
    if (fidget) {
      const auto avg = average_fidget(session_fidgets(s, models, false));
      row.insert(row.end(), avg.begin(), avg.end());
    }
    for (std::size_t k = 0; k < row.size(); ++k)
      rep.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    rep.participants.push_back(s.id);
    rep.labels.push_back(targets.at(s.id));
  }
  const auto id_folds = partition_participants(rep.participants, config.get_int("folds"), config.seed(), &targets);
  std::vector<std::vector<std::size_t>> folds;
  for (const auto& f : id_folds) {
    std::vector<std::size_t> rows;
    for (const auto& id : f)
      rows.push_back(static_cast<std::size_t>(
          std::find(rep.participants.begin(), rep.participants.end(), id) - rep.participants.begin()));
    std::sort(rows.begin(), rows.end());
    folds.push_back(std::move(rows));
  }
  rep.linear = linear_classify(rep.features, rep.labels, folds);
  rep.polarity = polarity_report(rep.linear, rep.names, config.get_double("polarity_tolerance"));
  rep.search = feature_search(rep.features, rep.labels, folds, rep.names, search_config(config));
  log_info("analysis: linear F1 " + format_fixed(rep.linear.f1_mean, 4) + ", searched F1 " +
           format_fixed(rep.search.best.f1_mean, 4) + (rep.search.approximate ? " (beam)" : " (exhaustive)"));
  return rep;
}

}  // namespace fidget
