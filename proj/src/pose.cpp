#include "fidget/pose.hpp"

#include "fidget/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fidget {

namespace {

const std::set<std::string>& segment_groups() {
  static const std::set<std::string> names = {
      KeypointSchema::kForearmLeft,   KeypointSchema::kForearmRight,
      KeypointSchema::kUpperArmLeft,  KeypointSchema::kUpperArmRight,
      KeypointSchema::kUpperLegLeft,  KeypointSchema::kUpperLegRight,
      KeypointSchema::kLowerLegLeft,  KeypointSchema::kLowerLegRight};
  return names;
}

std::vector<int> sorted_union(std::initializer_list<const std::vector<int>*> parts) {
  std::set<int> all;
  for (const auto* p : parts) all.insert(p->begin(), p->end());
  return {all.begin(), all.end()};
}

}  // namespace

KeypointSchema::KeypointSchema(int num_keypoints,
                               std::map<std::string, std::vector<int>> groups)
    : num_keypoints_(num_keypoints), groups_(std::move(groups)) {
  validate(num_keypoints_);
}

void KeypointSchema::validate(int num_keypoints) const {
  for (const auto& [name, idx] : groups_) {
    if (idx.empty()) throw SchemaError("schema group '" + name + "' is empty");
    for (int i : idx) {
      if (i < 0 || i >= num_keypoints) {
        throw SchemaError("schema group '" + name + "' index " + std::to_string(i) +
                          " outside keypoint count " + std::to_string(num_keypoints));
      }
    }
    if (segment_groups().count(name) && idx.size() != 2) {
      throw SchemaError("schema group '" + name + "' must name exactly two joints");
    }
    if ((name == kNeck || name == kMidHip) && idx.size() != 1) {
      throw SchemaError("schema group '" + name + "' must name exactly one keypoint");
    }
  }
  if (has(kHandLeft) && has(kHandRight)) {
    const auto& l = group(kHandLeft);
    for (int i : group(kHandRight)) {
      if (std::find(l.begin(), l.end(), i) != l.end()) {
        throw SchemaError("hand_left and hand_right share keypoint " + std::to_string(i));
      }
    }
  }
}

const std::vector<int>& KeypointSchema::group(const std::string& name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw SchemaError("schema has no group '" + name + "'");
  return it->second;
}

std::vector<int> KeypointSchema::leg_points() const {
  if (has(kLegs)) return group(kLegs);
  return sorted_union({&group(kUpperLegLeft), &group(kUpperLegRight),
                       &group(kLowerLegLeft), &group(kLowerLegRight)});
}

std::vector<int> KeypointSchema::hand_points() const {
  return sorted_union({&group(kHandLeft), &group(kHandRight)});
}

std::vector<int> KeypointSchema::all_points() const {
  std::vector<int> all(static_cast<std::size_t>(num_keypoints_));
  for (int i = 0; i < num_keypoints_; ++i) all[static_cast<std::size_t>(i)] = i;
  return all;
}

KeypointSchema KeypointSchema::from_json_text(const std::string& text, int num_keypoints) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("schema: top level must be an object");
  std::map<std::string, std::vector<int>> groups;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "num_keypoints") {
      if (!it->is_number_integer()) throw ParseError("schema: field 'num_keypoints' must be an integer");
      if (num_keypoints <= 0) num_keypoints = it->get<int>();
      continue;
    }
    if (!it->is_array()) throw ParseError("schema: field '" + it.key() + "' must be an index array");
    std::vector<int> idx;
    for (const auto& v : *it) {
      if (!v.is_number_integer()) throw ParseError("schema: field '" + it.key() + "' has a non-integer index");
      idx.push_back(v.get<int>());
    }
    groups.emplace(it.key(), std::move(idx));
  }
  if (num_keypoints <= 0) throw SchemaError("schema: keypoint count unknown");
  return KeypointSchema(num_keypoints, std::move(groups));
}

KeypointSchema KeypointSchema::from_json_file(const std::filesystem::path& path, int num_keypoints) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), num_keypoints);
}

std::string KeypointSchema::to_json() const {
  nlohmann::ordered_json j;
  j["num_keypoints"] = num_keypoints_;
  for (const auto& [name, idx] : groups_) j[name] = idx;
  return j.dump(2);
}

bool PoseSequence::fully_observed() const {
  for (const auto& f : frames)
    for (const auto& p : f.points)
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  return true;
}

int expected_track_dim(const std::string& name) {
  if (name == "AUs") return kAuDim;
  if (name == "Gaze") return kGazeDim;
  if (name == "MFCCs") return kMfccDim;
  return -1;
}

}  // namespace fidget
