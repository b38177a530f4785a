#pragma once

#include "fidget/adaptors.hpp"
#include "fidget/analysis.hpp"
#include "fidget/fusion.hpp"
#include "fidget/gestures.hpp"
#include "fidget/motion.hpp"
#include "fidget/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fidget {

// Flat run configuration. Keys are validated against a fixed registry:
// unknown keys, wrong types and out-of-range values raise ConfigError naming
// the key.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_json_text(const std::string& text, const std::string& source = "config");
  static RunConfig from_file(const std::string& path);

  // `key=value`; the value is read as JSON when it parses, else as a string.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, nlohmann::json value);
  bool has(const std::string& key) const;

  // Value or registry default.
  nlohmann::json get(const std::string& key) const;
  int get_int(const std::string& key) const { return get(key).get<int>(); }
  double get_double(const std::string& key) const { return get(key).get<double>(); }
  std::string get_string(const std::string& key) const { return get(key).get<std::string>(); }
  std::optional<std::string> path(const std::string& key) const;
  std::uint64_t seed() const;  // throws ConfigError when unset

  void require(const std::string& key, const std::string& command) const;

  // Explicitly set keys plus defaults of every hyper-parameter, sorted; paths
  // appear only when set and "out" never does.
  nlohmann::ordered_json resolved() const;
  std::string hash() const;

  static std::vector<std::string> known_keys();

 private:
  nlohmann::json values_ = nlohmann::json::object();
};

GestureConfig gesture_config(const RunConfig& c);
AdaptorConfig adaptor_config(const RunConfig& c);
SliceConfig slice_config(const RunConfig& c);
ActionTrainConfig action_config(const RunConfig& c);
FusionConfig fusion_config(const RunConfig& c);
SearchConfig search_config(const RunConfig& c);
BenchmarkConfig benchmark_config(const RunConfig& c);

}  // namespace fidget
