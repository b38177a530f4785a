#include "fidget/motion.hpp"

#include "fidget/errors.hpp"
#include "fidget/metrics.hpp"
#include "fidget/signal.hpp"
#include "fidget/text.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace fidget {

const char* to_string(SliceCategory c) {
  switch (c) {
    case SliceCategory::kBoth: return "BOTH";
    case SliceCategory::kLeft: return "LEFT";
    case SliceCategory::kRight: return "RIGHT";
    case SliceCategory::kLeg: return "LEG";
  }
  return "?";
}

SliceCategory parse_slice_category(const std::string& s) {
  for (auto c : kSliceCategories)
    if (s == to_string(c)) return c;
  throw ParseError("unknown slice category '" + s + "'");
}

const char* to_string(ActionLabel a) { return a == ActionLabel::kDynamic ? "DYNAMIC" : "STATIC"; }

std::vector<int> category_points(const KeypointSchema& schema, SliceCategory category) {
  switch (category) {
    case SliceCategory::kBoth: return schema.hand_points();
    case SliceCategory::kLeft: return schema.group(KeypointSchema::kHandLeft);
    case SliceCategory::kRight: return schema.group(KeypointSchema::kHandRight);
    case SliceCategory::kLeg: return schema.leg_points();
  }
  return {};
}

namespace {

Eigen::MatrixXd extract(const PoseSequence& seq, const std::vector<int>& points, std::size_t start,
                        std::size_t length) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(2 * points.size()), static_cast<Eigen::Index>(length));
  for (std::size_t t = 0; t < length; ++t) {
    const auto& frame = seq.frames[start + t];
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& p = frame.points[static_cast<std::size_t>(points[k])];
      m(static_cast<Eigen::Index>(2 * k), static_cast<Eigen::Index>(t)) = p.x;
      m(static_cast<Eigen::Index>(2 * k + 1), static_cast<Eigen::Index>(t)) = p.y;
    }
  }
  return m;
}

template <typename Pred, typename CategoryOf>
void slice_channel(const PoseSequence& seq, const std::vector<LocationCode>& channel, Pred include,
                   CategoryOf category_of, const SliceConfig& cfg, std::vector<TrajectorySlice>& out) {
  std::size_t i = 0;
  while (i < channel.size()) {
    std::size_t j = i;
    while (j < channel.size() && channel[j] == channel[i]) ++j;
    if (include(channel[i])) {
      const SliceCategory cat = category_of(channel[i]);
      const auto points = category_points(seq.schema, cat);
      for (std::size_t s = i; s + cfg.length <= j; s += cfg.step) {
        TrajectorySlice slice;
        slice.category = cat;
        slice.code = channel[i];
        slice.start = s;
        slice.run_start = i;
        slice.run_end = j;
        slice.trajectories = extract(seq, points, s, cfg.length);
        out.push_back(std::move(slice));
      }
    }
    i = j;
  }
}

}  // namespace

std::vector<TrajectorySlice> slice_sessions(const PoseSequence& seq, const LocationTimeline& timeline,
                                            const SliceConfig& config) {
  if (timeline.size() != seq.size()) throw DataError("slice_sessions: timeline and pose lengths differ");
  if (config.length == 0 || config.step == 0) throw std::invalid_argument("slice length and step must be positive");
  std::vector<TrajectorySlice> out;
  slice_channel(
      seq, timeline.left_hand, [](LocationCode c) { return c == LocationCode::kH2H; },
      [](LocationCode) { return SliceCategory::kBoth; }, config, out);
  slice_channel(
      seq, timeline.left_hand, [](LocationCode c) { return c != LocationCode::kH2H; },
      [](LocationCode) { return SliceCategory::kLeft; }, config, out);
  slice_channel(
      seq, timeline.right_hand, [](LocationCode c) { return c != LocationCode::kH2H; },
      [](LocationCode) { return SliceCategory::kRight; }, config, out);
  slice_channel(
      seq, timeline.legs, [](LocationCode) { return true; }, [](LocationCode) { return SliceCategory::kLeg; },
      config, out);
  return out;
}

std::array<double, kBandPoints> band_grid() {
  std::array<double, kBandPoints> g{};
  // integer steps avoid accumulated rounding: 0.5 + k * 0.05
  for (int k = 0; k < kBandPoints; ++k) g[static_cast<std::size_t>(k)] = (10.0 + k) / 20.0;
  return g;
}

std::array<double, kBandPoints> band_spectrum(std::span<const double> trajectory, double fps) {
  if (!(fps > 5.0)) throw std::invalid_argument("band_spectrum: fps must exceed 5 Hz");
  const double mu = mean(trajectory);
  const auto grid = band_grid();
  std::array<double, kBandPoints> out{};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    // Goertzel-style recurrence of the DTFT at an arbitrary frequency.
    const double omega = 2.0 * std::numbers::pi * grid[k] / fps;
    const double coeff = 2.0 * std::cos(omega);
    double s1 = 0.0, s2 = 0.0;
    for (double v : trajectory) {
      const double s0 = (v - mu) + coeff * s1 - s2;
      s2 = s1;
      s1 = s0;
    }
    const double re = s1 - s2 * std::cos(omega);
    const double im = s2 * std::sin(omega);
    out[k] = std::hypot(re, im);
  }
  return out;
}

Eigen::RowVectorXd SliceFeatures::flatten() const {
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(dim()));
  Eigen::Index i = 0;
  for (double x : fft) v(i++) = x;
  for (double x : std) v(i++) = x;
  for (double x : mean) v(i++) = x;
  return v;
}

SliceFeatures slice_features(const TrajectorySlice& slice, double fps) {
  SliceFeatures f;
  const auto rows = static_cast<std::size_t>(slice.trajectories.rows());
  const auto len = static_cast<std::size_t>(slice.trajectories.cols());
  f.fft.assign(kBandPoints, 0.0);
  f.std.resize(rows);
  f.mean.resize(rows);
  std::vector<double> traj(len);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < len; ++t)
      traj[t] = slice.trajectories(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t));
    const auto spec = band_spectrum(traj, fps);
    for (std::size_t k = 0; k < spec.size(); ++k) f.fft[k] += spec[k];
    f.std[r] = stddev(traj);
    f.mean[r] = mean(traj);
  }
  if (rows > 0)
    for (auto& v : f.fft) v /= static_cast<double>(rows);
  return f;
}

ActionClassifier ActionClassifier::train(SliceCategory category, const Eigen::MatrixXd& x,
                                         const std::vector<int>& labels, const ActionTrainConfig& config) {
  std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2)
    throw DataError(std::string("action classifier ") + to_string(category) + ": training set has a single class");
  ActionClassifier c;
  c.category_ = category;
  c.kind_ = config.kind;
  c.dim_ = static_cast<int>(x.cols());
  if (config.kind == ClassifierKind::kForest) {
    ForestConfig fc;
    fc.n_trees = config.n_trees;
    fc.max_depth = config.max_depth;
    fc.seed = config.seed;
    c.forest_.fit(x, labels, fc);
  } else {
    c.scaler_ = Standardizer::fit(x);
    Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];
    c.linear_.fit(c.scaler_.transform(x), y);
  }
  return c;
}

double ActionClassifier::score(const Eigen::Ref<const Eigen::RowVectorXd>& features) const {
  if (dim_ == 0) throw ModelError("action classifier is not trained");
  if (features.size() != dim_) {
    throw ModelError(std::string("action classifier ") + to_string(category_) + " expects " +
                     std::to_string(dim_) + " features, got " + std::to_string(features.size()));
  }
  if (kind_ == ClassifierKind::kForest) return forest_.predict_proba(features);
  const Eigen::MatrixXd z = scaler_.transform(features);
  return linear_.predict_proba(z.row(0));
}

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ModelError("truncated action model");
  return v;
}

void put_vec(std::ostream& out, const Eigen::RowVectorXd& v) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(out, v(i));
}

Eigen::RowVectorXd get_vec(std::istream& in) {
  const auto n = read_pod<std::uint32_t>(in);
  if (n > 1'000'000) throw ModelError("corrupt vector length in action model");
  Eigen::RowVectorXd v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = read_pod<double>(in);
  return v;
}

}  // namespace

void ActionClassifier::write(std::ostream& out) const {
  put<std::uint8_t>(out, static_cast<std::uint8_t>(category_));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(kind_));
  put<std::int32_t>(out, dim_);
  if (kind_ == ClassifierKind::kForest) {
    forest_.write(out);
  } else {
    put_vec(out, scaler_.mean);
    put_vec(out, scaler_.scale);
    put_vec(out, linear_.weights().transpose());
    put<double>(out, linear_.bias());
  }
}

ActionClassifier ActionClassifier::read(std::istream& in) {
  ActionClassifier c;
  const auto cat = read_pod<std::uint8_t>(in);
  const auto kind = read_pod<std::uint8_t>(in);
  if (cat > 3 || kind > 1) throw ModelError("corrupt action classifier header");
  c.category_ = static_cast<SliceCategory>(cat);
  c.kind_ = static_cast<ClassifierKind>(kind);
  c.dim_ = read_pod<std::int32_t>(in);
  if (c.kind_ == ClassifierKind::kForest) {
    c.forest_ = RandomForest::read(in);
    if (c.forest_.n_features() != c.dim_) throw ModelError("action classifier dimension mismatch");
  } else {
    c.scaler_.mean = get_vec(in);
    c.scaler_.scale = get_vec(in);
    Eigen::VectorXd w = get_vec(in).transpose();
    const double b = read_pod<double>(in);
    if (w.size() != c.dim_ || c.scaler_.mean.size() != c.dim_) throw ModelError("action classifier dimension mismatch");
    c.linear_.set_parameters(std::move(w), b);
  }
  return c;
}

ActionLabel classify_slice(const ActionClassifier& classifier, const SliceFeatures& features) {
  return classifier.score(features.flatten()) >= 0.5 ? ActionLabel::kDynamic : ActionLabel::kStatic;
}

TrainedAction train_action_classifier(SliceCategory category, const std::vector<SliceFeatures>& features,
                                      const std::vector<int>& labels,
                                      const std::vector<std::string>& participants,
                                      const ActionTrainConfig& config) {
  if (features.size() != labels.size() || features.size() != participants.size())
    throw DataError("train_action_classifier: features, labels and participants differ in length");
  if (features.empty()) throw DataError("train_action_classifier: no slices");
  const auto dim = static_cast<Eigen::Index>(features.front().dim());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()), dim);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (static_cast<Eigen::Index>(features[i].dim()) != dim) throw DataError("slice feature dimensions differ");
    x.row(static_cast<Eigen::Index>(i)) = features[i].flatten();
  }
  {
    std::set<int> classes(labels.begin(), labels.end());
    if (classes.size() < 2)
      throw DataError(std::string("action classifier ") + to_string(category) + ": training set has a single class");
  }

  TrainedAction result;
  result.cv.fold_participants = partition_participants(participants, config.folds, config.seed);
  for (std::size_t f = 0; f < result.cv.fold_participants.size(); ++f) {
    const std::set<std::string> test(result.cv.fold_participants[f].begin(), result.cv.fold_participants[f].end());
    std::vector<Eigen::Index> tr, te;
    for (std::size_t i = 0; i < participants.size(); ++i)
      (test.count(participants[i]) ? te : tr).push_back(static_cast<Eigen::Index>(i));
    std::vector<int> ytr, yte;
    for (auto i : tr) ytr.push_back(labels[static_cast<std::size_t>(i)]);
    for (auto i : te) yte.push_back(labels[static_cast<std::size_t>(i)]);
    if (te.empty()) continue;
    std::set<int> classes(ytr.begin(), ytr.end());
    std::vector<int> pred;
    if (classes.size() < 2) {
      pred.assign(yte.size(), ytr.empty() ? 0 : ytr.front());
    } else {
      ActionTrainConfig fold_cfg = config;
      fold_cfg.seed = config.seed + 1 + f;
      const auto model = ActionClassifier::train(category, x(tr, Eigen::all), ytr, fold_cfg);
      for (auto i : te) pred.push_back(model.score(x.row(i)) >= 0.5 ? 1 : 0);
    }
    const auto counts = binary_counts(pred, yte);
    result.cv.fold_accuracy.push_back(counts.accuracy());
    result.cv.fold_f1.push_back(counts.f1());
  }
  const auto acc = mean_std(result.cv.fold_accuracy);
  const auto f1 = mean_std(result.cv.fold_f1);
  result.cv.accuracy_mean = acc.mean;
  result.cv.accuracy_std = acc.std;
  result.cv.f1_mean = f1.mean;
  result.cv.f1_std = f1.std;
  result.classifier = ActionClassifier::train(category, x, labels, config);
  return result;
}

const ActionClassifier* ActionModelSet::get(SliceCategory c) const {
  auto it = models_.find(c);
  return it == models_.end() ? nullptr : &it->second;
}

std::uint64_t ActionModelSet::schema_hash() {
  std::string layout = "fft:" + std::to_string(kBandPoints) + "@" + format_double(kBandLowHz) + "+" +
                       format_double(kBandStepHz) + ";std:per-trajectory;mean:per-trajectory;label:DYNAMIC=1";
  return fnv1a(layout);
}

void ActionModelSet::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write action model " + path.string());
  out.write("FDGTACT1", 8);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, schema_hash());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(models_.size()));
  for (const auto& [cat, model] : models_) model.write(out);
}

ActionModelSet ActionModelSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("action model not found: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "FDGTACT1") throw ModelError(path.string() + " is not an action model file");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) throw ModelError("unsupported action model version " + std::to_string(version));
  if (read_pod<std::uint64_t>(in) != schema_hash()) throw ModelError("action model was trained on a different feature layout");
  const auto count = read_pod<std::uint32_t>(in);
  if (count > 4) throw ModelError("corrupt action model header");
  ActionModelSet set;
  for (std::uint32_t i = 0; i < count; ++i) set.set(ActionClassifier::read(in));
  return set;
}

}  // namespace fidget
