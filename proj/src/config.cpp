#include "fidget/config.hpp"

#include "fidget/errors.hpp"
#include "fidget/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fidget {

namespace {

enum class Kind { kInt, kSeed, kDouble, kString, kPath, kStringList };

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Key {
  const char* name;
  Kind kind;
  nlohmann::json def;  // null: unset by default
  double lo = -kInf, hi = kInf;
  bool lo_open = false;
  std::vector<std::string> choices = {};
};

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      {"seed", Kind::kSeed, nullptr},
      {"fps", Kind::kDouble, 26.0, 0.0, kInf, true},
      {"window_length", Kind::kInt, 10, 1},
      {"close_windows", Kind::kInt, 3, 1},
      {"threshold_percentile", Kind::kDouble, 75.0, 0.0, 100.0},
      {"threshold", Kind::kDouble, nullptr, 0.0},
      {"arm_width", Kind::kDouble, nullptr, 0.0, kInf, true},
      {"leg_width", Kind::kDouble, nullptr, 0.0, kInf, true},
      {"arm_width_factor", Kind::kDouble, 0.5, 0.0, kInf, true},
      {"leg_width_factor", Kind::kDouble, 1.0, 0.0, kInf, true},
      {"min_duration", Kind::kInt, 100, 0},
      {"slice_length", Kind::kInt, 100, 8},
      {"slice_step", Kind::kInt, 50, 1},
      {"motion_classifier", Kind::kString, "forest", -kInf, kInf, false, {"forest", "linear"}},
      {"trees", Kind::kInt, 100, 1},
      {"max_depth", Kind::kInt, 8, 1, 64},
      {"motion_folds", Kind::kInt, 5, 2},
      {"groups", Kind::kStringList, {"Fidget", "Gaze", "AUs", "MFCCs"}},
      {"K", Kind::kInt, 32, 1},
      {"rf_num", Kind::kInt, 200, 1},
      {"smoothing", Kind::kDouble, 0.4, 0.0, 0.999},
      {"folds", Kind::kInt, 3, 2},
      {"classifier", Kind::kString, "mlp", -kInf, kInf, false, {"lr", "mlp"}},
      {"target", Kind::kString, "depression", -kInf, kInf, false, {"depression", "anxiety"}},
      {"ddae_noise", Kind::kDouble, 0.1, 0.0},
      {"ddae_epochs", Kind::kInt, 40, 1},
      {"ddae_batch", Kind::kInt, 64, 1},
      {"ddae_learning_rate", Kind::kDouble, 1e-3, 0.0, kInf, true},
      {"ddae_patience", Kind::kInt, 10, 1},
      {"ddae_max_frames", Kind::kInt, 20000, 100},
      {"gmm_iterations", Kind::kInt, 100, 1},
      {"gmm_max_frames", Kind::kInt, 50000, 100},
      {"mlp_hidden", Kind::kInt, 64, 1},
      {"mlp_epochs", Kind::kInt, 300, 1},
      {"shuffles", Kind::kInt, 20, 0},
      {"polarity_tolerance", Kind::kDouble, 1e-3, 0.0},
      {"beam_width", Kind::kInt, 50, 1},
      {"exhaustive_limit", Kind::kInt, 20, 1, 24},
      {"analysis_features", Kind::kString, "all", -kInf, kInf, false, {"gesture", "fidget", "all"}},
      {"search_log_limit", Kind::kInt, 1000, 0},
      {"participants", Kind::kInt, 12, 1},
      {"duration_s", Kind::kDouble, 80.0, 10.0},
      {"participant_speaker", Kind::kString, "participant"},
      {"corpus", Kind::kPath, nullptr},
      {"out", Kind::kPath, nullptr},
      {"model", Kind::kPath, nullptr},
      {"motion_model", Kind::kPath, nullptr},
      {"schema", Kind::kPath, nullptr},
      {"pose", Kind::kPath, nullptr},
      {"aus", Kind::kPath, nullptr},
      {"gaze", Kind::kPath, nullptr},
      {"mfcc", Kind::kPath, nullptr},
      {"diarization", Kind::kPath, nullptr},
      {"script", Kind::kPath, nullptr},
  };
  return keys;
}

const Key& lookup(const std::string& name) {
  for (const auto& k : registry())
    if (name == k.name) return k;
  throw ConfigError("unknown config key '" + name + "'");
}

std::string range_text(const Key& k) {
  std::string s = k.lo_open ? "> " : ">= ";
  s += format_double(k.lo);
  if (std::isfinite(k.hi)) s += " and <= " + format_double(k.hi);
  return s;
}

void check(const Key& k, const nlohmann::json& v) {
  const std::string where = "config key '" + std::string(k.name) + "'";
  if (v.is_null()) return;
  switch (k.kind) {
    case Kind::kSeed:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError(where + " must be a non-negative integer");
      return;
    case Kind::kInt:
    case Kind::kDouble: {
      if (k.kind == Kind::kInt && !v.is_number_integer()) throw ConfigError(where + " must be an integer");
      if (!v.is_number()) throw ConfigError(where + " must be a number");
      const double x = v.get<double>();
      const bool low_ok = k.lo_open ? x > k.lo : x >= k.lo;
      if (!std::isfinite(x) || !low_ok || x > k.hi)
        throw ConfigError(where + " must be " + range_text(k) + ", got " + v.dump());
      return;
    }
    case Kind::kString:
    case Kind::kPath:
      if (!v.is_string()) throw ConfigError(where + " must be a string");
      if (!k.choices.empty() &&
          std::find(k.choices.begin(), k.choices.end(), v.get<std::string>()) == k.choices.end()) {
        std::string list;
        for (const auto& c : k.choices) list += (list.empty() ? "" : ", ") + c;
        throw ConfigError(where + " must be one of {" + list + "}, got " + v.dump());
      }
      return;
    case Kind::kStringList: {
      if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a non-empty list of strings");
      std::vector<std::string> seen;
      for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError(where + " must be a non-empty list of strings");
        const auto s = e.get<std::string>();
        const auto& names = fusion_group_names();
        if (std::find(names.begin(), names.end(), s) == names.end())
          throw ConfigError(where + ": unknown feature group '" + s + "'");
        if (std::find(seen.begin(), seen.end(), s) != seen.end())
          throw ConfigError(where + ": duplicate group '" + s + "'");
        seen.push_back(s);
      }
      const bool fidget = std::find(seen.begin(), seen.end(), "Fidget") != seen.end();
      const bool pure = std::find(seen.begin(), seen.end(), "Fidget_pure") != seen.end();
      if (fidget && pure) throw ConfigError(where + ": Fidget and Fidget_pure are exclusive");
      return;
    }
  }
}

}  // namespace

std::vector<std::string> RunConfig::known_keys() {
  std::vector<std::string> out;
  for (const auto& k : registry()) out.emplace_back(k.name);
  return out;
}

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  RunConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) c.set(it.key(), it.value());
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  return from_json_text(text, path);
}

void RunConfig::set(const std::string& key, nlohmann::json value) {
  const Key& k = lookup(key);
  if (k.kind == Kind::kDouble && value.is_number_integer()) value = value.get<double>();
  check(k, value);
  if (value.is_null()) {
    values_.erase(key);
  } else {
    values_[key] = std::move(value);
  }
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must be key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  const Key& k = lookup(key);
  nlohmann::json v;
  if (k.kind == Kind::kPath || (k.kind == Kind::kString)) {
    v = raw;
  } else {
    try {
      v = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
      if (k.kind == Kind::kStringList) {
        v = nlohmann::json::array();
        for (auto part : split(raw, ',')) v.push_back(std::string(trim(part)));
      } else {
        throw ConfigError("config key '" + key + "': cannot parse value '" + raw + "'");
      }
    }
  }
  set(key, std::move(v));
}

bool RunConfig::has(const std::string& key) const { return values_.contains(key); }

nlohmann::json RunConfig::get(const std::string& key) const {
  const Key& k = lookup(key);
  if (values_.contains(key)) return values_.at(key);
  return k.def;
}

std::optional<std::string> RunConfig::path(const std::string& key) const {
  const auto v = get(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

std::uint64_t RunConfig::seed() const {
  if (!has("seed")) throw ConfigError("config key 'seed' is required");
  return values_.at("seed").get<std::uint64_t>();
}

void RunConfig::require(const std::string& key, const std::string& command) const {
  if (!has(key)) throw ConfigError("config key '" + key + "' is required for " + command);
}

nlohmann::ordered_json RunConfig::resolved() const {
  nlohmann::ordered_json out;
  std::vector<const Key*> keys;
  for (const auto& k : registry()) keys.push_back(&k);
  std::sort(keys.begin(), keys.end(), [](const Key* a, const Key* b) { return std::string(a->name) < b->name; });
  for (const Key* k : keys) {
    if (std::string(k->name) == "out") continue;
    const auto v = get(k->name);
    if (v.is_null()) continue;
    out[k->name] = v;
  }
  return out;
}

std::string RunConfig::hash() const { return hex64(fnv1a(resolved().dump())); }

GestureConfig gesture_config(const RunConfig& c) {
  GestureConfig g;
  g.window_length = static_cast<std::size_t>(c.get_int("window_length"));
  g.close_windows = static_cast<std::size_t>(c.get_int("close_windows"));
  g.threshold_percentile = c.get_double("threshold_percentile");
  if (c.has("threshold")) g.absolute_threshold = c.get_double("threshold");
  return g;
}

AdaptorConfig adaptor_config(const RunConfig& c) {
  AdaptorConfig a;
  if (c.has("arm_width")) a.arm_width = c.get_double("arm_width");
  if (c.has("leg_width")) a.leg_width = c.get_double("leg_width");
  a.arm_width_factor = c.get_double("arm_width_factor");
  a.leg_width_factor = c.get_double("leg_width_factor");
  a.min_duration = c.get_int("min_duration");
  return a;
}

SliceConfig slice_config(const RunConfig& c) {
  SliceConfig s;
  s.length = static_cast<std::size_t>(c.get_int("slice_length"));
  s.step = static_cast<std::size_t>(c.get_int("slice_step"));
  return s;
}

ActionTrainConfig action_config(const RunConfig& c) {
  ActionTrainConfig a;
  a.kind = c.get_string("motion_classifier") == "linear" ? ClassifierKind::kLinear : ClassifierKind::kForest;
  a.n_trees = c.get_int("trees");
  a.max_depth = c.get_int("max_depth");
  a.folds = c.get_int("motion_folds");
  a.seed = c.has("seed") ? c.seed() : 0;
  return a;
}

FusionConfig fusion_config(const RunConfig& c) {
  FusionConfig f;
  f.groups = c.get("groups").get<std::vector<std::string>>();
  f.gmm.components = c.get_int("K");
  f.gmm.max_iterations = c.get_int("gmm_iterations");
  f.gmm.max_frames = static_cast<std::size_t>(c.get_int("gmm_max_frames"));
  f.ddae.noise = c.get_double("ddae_noise");
  f.ddae.max_epochs = c.get_int("ddae_epochs");
  f.ddae.batch_size = c.get_int("ddae_batch");
  f.ddae.learning_rate = c.get_double("ddae_learning_rate");
  f.ddae.patience = c.get_int("ddae_patience");
  f.ddae.max_frames = static_cast<std::size_t>(c.get_int("ddae_max_frames"));
  f.rf_num = c.get_int("rf_num");
  f.smoothing = c.get_double("smoothing");
  f.classifier = parse_distress_kind(c.get_string("classifier"));
  f.mlp.hidden = c.get_int("mlp_hidden");
  f.mlp.epochs = c.get_int("mlp_epochs");
  f.folds = c.get_int("folds");
  f.seed = c.has("seed") ? c.seed() : 0;
  return f;
}

SearchConfig search_config(const RunConfig& c) {
  SearchConfig s;
  s.beam_width = c.get_int("beam_width");
  s.exhaustive_limit = c.get_int("exhaustive_limit");
  return s;
}

BenchmarkConfig benchmark_config(const RunConfig& c) {
  BenchmarkConfig b;
  b.participants = c.get_int("participants");
  b.seed = c.seed();
  b.fps = c.get_double("fps");
  b.duration_s = c.get_double("duration_s");
  return b;
}

}  // namespace fidget
