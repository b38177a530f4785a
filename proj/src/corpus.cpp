#include "fidget/corpus.hpp"

#include "fidget/distress.hpp"
#include "fidget/errors.hpp"
#include "fidget/text.hpp"

#include <json.hpp>

namespace fidget {

std::map<std::string, ParticipantLabels> parse_labels_csv(const std::string& text, const std::string& source) {
  std::map<std::string, ParticipantLabels> out;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (header.empty()) {
      for (auto c : cells) header.emplace_back(trim(c));
      if (header.empty() || header[0] != "participant")
        throw ParseError(source + " line 1: first column must be 'participant'");
      continue;
    }
    const std::string where = source + " line " + std::to_string(line_no);
    if (cells.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields");
    ParticipantLabels l;
    bool has_dep = false, has_anx = false;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      double v = 0.0;
      if (!parse_double(cells[i], v) || !std::isfinite(v))
        throw ParseError(where + ": field '" + header[i] + "' is not a number");
      if (header[i] == "phq8") l.phq8 = v;
      else if (header[i] == "gad7") l.gad7 = v;
      else if (header[i] == "depression") l.depression = static_cast<int>(v), has_dep = true;
      else if (header[i] == "anxiety") l.anxiety = static_cast<int>(v), has_anx = true;
    }
    if (!has_dep) l.depression = depression_label(l.phq8);
    if (!has_anx) l.anxiety = anxiety_label(l.gad7);
    const std::string id(trim(cells[0]));
    if (out.count(id)) throw ParseError(where + ": duplicate participant " + id);
    out[id] = l;
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "corpus.json" : path;
  if (!std::filesystem::exists(file)) throw DataError("corpus file " + file.string() + " does not exist");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  Corpus c;
  c.root = file.parent_path();
  try {
    c.fps = j.value("fps", 26.0);
    const auto schema_rel = j.value("schema", std::string("schema.json"));
    c.schema = KeypointSchema::from_json_file(c.root / schema_rel, 0);
    const auto speaker = j.value("participant_speaker", std::string("participant"));
    if (j.contains("labels")) {
      const auto lp = c.root / j.at("labels").get<std::string>();
      c.labels = parse_labels_csv(read_file(lp), lp.string());
    }
    for (const auto& e : j.at("sessions")) {
      SessionSource s;
      s.id = e.at("id").get<std::string>();
      const auto dir = c.root / e.at("dir").get<std::string>();
      s.pose = dir / "pose.jsonl";
      const auto opt = [&dir](const char* name) -> std::optional<std::filesystem::path> {
        const auto p = dir / name;
        if (std::filesystem::exists(p)) return p;
        return std::nullopt;
      };
      s.sidecars.aus = opt("aus.csv");
      s.sidecars.gaze = opt("gaze.csv");
      s.sidecars.mfcc = opt("mfcc.csv");
      s.sidecars.diarization = opt("diarization.csv");
      s.sidecars.participant_speaker = speaker;
      s.truth = opt("truth.csv");
      c.sessions.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  if (c.sessions.empty()) throw DataError(file.string() + ": corpus lists no sessions");
  return c;
}

std::map<std::string, int> Corpus::targets(const std::string& target) const {
  std::map<std::string, int> out;
  for (const auto& s : sessions) {
    auto it = labels.find(s.id);
    if (it == labels.end()) throw DataError("no label for participant " + s.id);
    out[s.id] = target == "anxiety" ? it->second.anxiety : it->second.depression;
  }
  return out;
}

std::string file_hash(const std::filesystem::path& path) { return hex64(fnv1a(read_file(path))); }

std::map<std::string, std::string> Corpus::file_hashes() const {
  std::map<std::string, std::string> out;
  const auto add = [&](const std::filesystem::path& p) {
    out[std::filesystem::relative(p, root).generic_string()] = file_hash(p);
  };
  for (const char* f : {"corpus.json", "schema.json", "labels.csv"})
    if (std::filesystem::exists(root / f)) add(root / f);
  for (const auto& s : sessions) {
    add(s.pose);
    for (const auto& p : {s.sidecars.aus, s.sidecars.gaze, s.sidecars.mfcc, s.sidecars.diarization, s.truth})
      if (p) add(*p);
  }
  return out;
}

}  // namespace fidget
