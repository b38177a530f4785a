#include "fidget/fusion.hpp"

#include "fidget/errors.hpp"
#include "fidget/fisher.hpp"
#include "fidget/log.hpp"
#include "fidget/metrics.hpp"
#include "fidget/pose.hpp"
#include "fidget/random.hpp"
#include "fidget/text.hpp"

#include <json.hpp>

#include <algorithm>

namespace fidget {

const std::vector<std::string>& fusion_group_names() {
  static const std::vector<std::string> kNames = {"Fidget", "Fidget_pure", "Gaze", "AUs", "MFCCs"};
  return kNames;
}

int fusion_group_dim(const std::string& name) {
  if (name == "Fidget") return 9;
  if (name == "Fidget_pure") return 8;
  if (name == "Gaze") return kGazeDim;
  if (name == "AUs") return kAuDim;
  if (name == "MFCCs") return kMfccDim;
  throw ConfigError("unknown feature group '" + name + "'");
}

void Provenance::record(const std::string& stage, const std::vector<std::string>& row_participants) {
  auto& s = stages_[stage];
  s.insert(row_participants.begin(), row_participants.end());
}

void Provenance::audit(const std::vector<std::string>& held_out) const {
  for (const auto& [stage, ids] : stages_)
    for (const auto& p : held_out)
      if (ids.count(p)) throw LeakError("stage '" + stage + "' was fitted on held-out participant " + p);
}

namespace {

std::vector<DdaeGroup> ddae_groups(const std::vector<std::string>& names) {
  std::vector<DdaeGroup> g;
  for (const auto& n : names) g.push_back({n, fusion_group_dim(n), default_group_weight(n)});
  return g;
}

GroupFrames concat_frames(const std::vector<const SessionFrames*>& sessions, std::vector<std::string>* tags) {
  if (sessions.empty()) throw DataError("no training sessions");
  const std::size_t ng = sessions.front()->groups.size();
  Eigen::Index total = 0;
  for (const auto* s : sessions) {
    if (s->groups.size() != ng) throw DataError("sessions differ in feature groups");
    total += s->groups.front().rows();
  }
  GroupFrames out(ng);
  for (std::size_t g = 0; g < ng; ++g) out[g].resize(total, sessions.front()->groups[g].cols());
  Eigen::Index row = 0;
  for (const auto* s : sessions) {
    const auto n = s->groups.front().rows();
    for (std::size_t g = 0; g < ng; ++g) {
      if (s->groups[g].rows() != n) throw DataError("session " + s->participant + ": groups differ in frame count");
      if (s->groups[g].cols() != out[g].cols()) throw DataError("session " + s->participant + ": group width mismatch");
      out[g].middleRows(row, n) = s->groups[g];
    }
    if (tags) tags->insert(tags->end(), static_cast<std::size_t>(n), s->participant);
    row += n;
  }
  return out;
}

}  // namespace

Eigen::VectorXd EmbeddingStage::embed(const GroupFrames& frames) const {
  return fisher_vector(ddae.encode(frames), gmm);
}

EmbeddingStage fit_embedding(const std::vector<const SessionFrames*>& train, const FusionConfig& config,
                             std::uint64_t seed, Provenance* provenance) {
  std::vector<std::string> tags;
  const GroupFrames frames = concat_frames(train, &tags);
  EmbeddingStage st;
  DdaeConfig dc = config.ddae;
  dc.seed = mix_seed(seed, 1);
  if (provenance) provenance->record("ddae", tags);
  st.ddae = train_ddae(ddae_groups(config.groups), frames, dc, &st.ddae_history);
  const Eigen::MatrixXd latents = st.ddae.encode(frames);
  GmmConfig gc = config.gmm;
  gc.seed = mix_seed(seed, 2);
  if (provenance) provenance->record("gmm", tags);
  auto fit = fit_gmm(latents, gc);
  st.gmm = std::move(fit.model);
  st.gmm_log_likelihood = std::move(fit.log_likelihood);
  return st;
}

double SupervisedStage::predict_proba(const Eigen::VectorXd& embedding) const {
  const Eigen::MatrixXd row = take_columns(embedding.transpose(), selected);
  return classifier.predict_proba(row.row(0));
}

SupervisedStage fit_supervised(const Eigen::MatrixXd& x, const std::vector<int>& y,
                               const std::vector<std::string>& row_participants, const FusionConfig& config,
                               std::uint64_t seed, Provenance* provenance) {
  SupervisedStage st;
  if (provenance) provenance->record("rf_selection", row_participants);
  st.selected = select_features(x, y, config.rf_num, mix_seed(seed, 3));
  if (provenance) provenance->record("classifier", row_participants);
  st.classifier =
      DistressClassifier::train(take_columns(x, st.selected), y, config.classifier, config.smoothing,
                                mix_seed(seed, 4), config.mlp);
  return st;
}

double FusionModel::predict_proba(const GroupFrames& frames) const {
  return supervised.predict_proba(embedding.embed(frames));
}

void FusionModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_file(dir / "ddae.json", embedding.ddae.to_json().dump() + "\n");
  write_file(dir / "gmm.json", embedding.gmm.to_json().dump() + "\n");
  nlohmann::json sel;
  sel["groups"] = groups;
  sel["selected"] = supervised.selected;
  sel["embedding_dim"] = 2 * embedding.gmm.components() * embedding.gmm.dim();
  write_file(dir / "selection.json", sel.dump(2) + "\n");
  write_file(dir / "classifier.json", supervised.classifier.to_json().dump() + "\n");
}

FusionModel FusionModel::load(const std::filesystem::path& dir) {
  for (const char* f : {"ddae.json", "gmm.json", "selection.json", "classifier.json"})
    if (!std::filesystem::exists(dir / f)) throw ModelError("fusion bundle " + dir.string() + " lacks " + f);
  const auto parse = [&dir](const char* f) {
    try {
      return nlohmann::json::parse(read_file(dir / f));
    } catch (const nlohmann::json::exception& e) {
      throw ModelError("fusion bundle file " + (dir / f).string() + ": " + e.what());
    }
  };
  FusionModel m;
  m.embedding.ddae = DdaeModel::from_json(parse("ddae.json"));
  m.embedding.gmm = GmmModel::from_json(parse("gmm.json"));
  const auto sel = parse("selection.json");
  try {
    m.groups = sel.at("groups").get<std::vector<std::string>>();
    m.supervised.selected = sel.at("selected").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("fusion bundle selection.json: ") + e.what());
  }
  m.supervised.classifier = DistressClassifier::from_json(parse("classifier.json"));
  if (m.embedding.gmm.dim() != m.embedding.ddae.latent_dim())
    throw ModelError("fusion bundle: gmm and ddae latent widths differ");
  return m;
}

FusionModel train_fusion(const std::vector<SessionFrames>& sessions, const std::map<std::string, int>& labels,
                         const FusionConfig& config) {
  std::vector<const SessionFrames*> train;
  for (const auto& s : sessions) train.push_back(&s);
  FusionModel m;
  m.groups = config.groups;
  m.embedding = fit_embedding(train, config, config.seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(sessions.size()), 0);
  std::vector<int> y;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const Eigen::VectorXd e = m.embedding.embed(sessions[i].groups);
    if (i == 0) x.resize(static_cast<Eigen::Index>(sessions.size()), e.size());
    x.row(static_cast<Eigen::Index>(i)) = e.transpose();
    auto it = labels.find(sessions[i].participant);
    if (it == labels.end()) throw DataError("no label for participant " + sessions[i].participant);
    y.push_back(it->second);
    ids.push_back(sessions[i].participant);
  }
  m.supervised = fit_supervised(x, y, ids, config, config.seed);
  return m;
}

std::vector<std::vector<std::string>> fusion_folds(const std::map<std::string, int>& labels,
                                                   const FusionConfig& config) {
  std::vector<std::string> ids;
  for (const auto& [id, label] : labels) ids.push_back(id);
  return partition_participants(ids, config.folds, config.seed, &labels);
}

std::vector<FoldEmbeddings> embed_folds(const std::vector<std::vector<std::string>>& folds,
                                        const FrameProvider& provider, const FusionConfig& config) {
  std::vector<FoldEmbeddings> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    FoldEmbeddings fe;
    const std::set<std::string> test(folds[f].begin(), folds[f].end());
    std::vector<std::string> train_ids;
    for (std::size_t o = 0; o < folds.size(); ++o)
      if (o != f) train_ids.insert(train_ids.end(), folds[o].begin(), folds[o].end());
    std::sort(train_ids.begin(), train_ids.end());
    const auto sessions = provider(train_ids, fe.provenance);
    std::vector<const SessionFrames*> train;
    for (const auto& s : sessions)
      if (!test.count(s.participant)) train.push_back(&s);
    const std::uint64_t seed = mix_seed(config.seed, 1000 + f);
    const auto stage = fit_embedding(train, config, seed, &fe.provenance);
    fe.ddae_initial_loss = stage.ddae_history.initial_loss;
    fe.ddae_final_loss = stage.ddae_history.final_loss;
    std::vector<Eigen::VectorXd> tr, te;
    for (const auto& s : sessions) {
      Eigen::VectorXd e = stage.embed(s.groups);
      if (test.count(s.participant)) {
        fe.test_ids.push_back(s.participant);
        te.push_back(std::move(e));
      } else {
        fe.train_ids.push_back(s.participant);
        tr.push_back(std::move(e));
      }
    }
    const auto to_matrix = [](const std::vector<Eigen::VectorXd>& rows) {
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      return m;
    };
    fe.train_x = to_matrix(tr);
    fe.test_x = to_matrix(te);
    log_info("fold " + std::to_string(f + 1) + "/" + std::to_string(folds.size()) + ": ddae loss " +
             format_fixed(fe.ddae_initial_loss, 4) + " -> " + format_fixed(fe.ddae_final_loss, 4));
    out.push_back(std::move(fe));
  }
  return out;
}

namespace {

std::vector<int> labels_for(const std::vector<std::string>& ids, const std::map<std::string, int>& labels) {
  std::vector<int> y;
  for (const auto& id : ids) {
    auto it = labels.find(id);
    if (it == labels.end()) throw DataError("no label for participant " + id);
    y.push_back(it->second);
  }
  return y;
}

std::vector<std::string> unique_sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

FoldReport classify_fold(const FoldEmbeddings& fold, const std::map<std::string, int>& labels,
                         const FusionConfig& config, std::size_t fold_index) {
  FoldReport r;
  r.train_participants = unique_sorted(fold.train_ids);
  r.test_participants = unique_sorted(fold.test_ids);
  Provenance prov = fold.provenance;
  const auto ytr = labels_for(fold.train_ids, labels);
  r.truth = labels_for(fold.test_ids, labels);
  const std::set<int> classes(ytr.begin(), ytr.end());
  if (classes.size() < 2) {
    // Degenerate training fold (possible under relabeling): predict its class.
    r.predicted.assign(r.truth.size(), ytr.empty() ? 0 : ytr.front());
    r.scores.assign(r.truth.size(), r.predicted.empty() ? 0.0 : r.predicted.front());
  } else {
    const auto st = fit_supervised(fold.train_x, ytr, fold.train_ids, config, mix_seed(config.seed, 2000 + fold_index),
                                   &prov);
    for (Eigen::Index i = 0; i < fold.test_x.rows(); ++i) {
      const double p = st.predict_proba(fold.test_x.row(i).transpose());
      r.scores.push_back(p);
      r.predicted.push_back(p >= 0.5 ? 1 : 0);
    }
  }
  prov.audit(r.test_participants);
  r.leak_checked = true;
  r.provenance = prov.stages();
  const auto c = binary_counts(r.predicted, r.truth);
  r.f1 = c.f1();
  r.precision = c.precision();
  r.recall = c.recall();
  r.accuracy = c.accuracy();
  return r;
}

CvResult summarize(std::vector<FoldReport> folds) {
  CvResult res;
  res.folds = std::move(folds);
  std::vector<double> f1;
  for (const auto& f : res.folds) f1.push_back(f.f1);
  const auto ms = mean_std(f1);
  res.f1_mean = ms.mean;
  res.f1_std = ms.std;
  return res;
}

CvResult cross_validate(const std::map<std::string, int>& labels, const FrameProvider& provider,
                        const FusionConfig& config) {
  const auto folds = fusion_folds(labels, config);
  const auto emb = embed_folds(folds, provider, config);
  std::vector<FoldReport> reports;
  for (std::size_t f = 0; f < emb.size(); ++f) reports.push_back(classify_fold(emb[f], labels, config, f));
  return summarize(std::move(reports));
}

std::vector<double> permutation_f1(const std::vector<FoldEmbeddings>& folds, const std::map<std::string, int>& labels,
                                   const FusionConfig& config, int shuffles, std::uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<int> values;
  for (const auto& [id, label] : labels) {
    ids.push_back(id);
    values.push_back(label);
  }
  Rng rng(mix_seed(seed, 77));
  std::vector<double> out;
  for (int s = 0; s < shuffles; ++s) {
    rng.shuffle(values);
    std::map<std::string, int> permuted;
    for (std::size_t i = 0; i < ids.size(); ++i) permuted[ids[i]] = values[i];
    std::vector<FoldReport> reports;
    for (std::size_t f = 0; f < folds.size(); ++f) reports.push_back(classify_fold(folds[f], permuted, config, f));
    out.push_back(summarize(std::move(reports)).f1_mean);
  }
  return out;
}

}  // namespace fidget
