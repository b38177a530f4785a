#pragma once

#include "fidget/ingest.hpp"
#include "fidget/synth.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fidget {

// Input files of one session. Missing sidecars stay unset.
struct SessionSource {
  std::string id;
  std::filesystem::path pose;
  SidecarPaths sidecars;
  std::optional<std::filesystem::path> truth;
};

struct ParticipantLabels {
  double phq8 = 0.0, gad7 = 0.0;
  int depression = 0, anxiety = 0;
};

// corpus.json: {"fps", "schema", "labels", "participant_speaker",
// "sessions": [{"id", "dir"}, ...]} with paths relative to the corpus root.
// Each session directory holds pose.jsonl and optional aus.csv, gaze.csv,
// mfcc.csv, diarization.csv and truth.csv.
struct Corpus {
  std::filesystem::path root;
  double fps = 26.0;
  KeypointSchema schema;
  std::vector<SessionSource> sessions;
  std::map<std::string, ParticipantLabels> labels;

  // Binary label per participant for "depression" or "anxiety".
  std::map<std::string, int> targets(const std::string& target) const;
  // Relative path -> content hash of every file the corpus references.
  std::map<std::string, std::string> file_hashes() const;
};

// `path` is the corpus directory or its corpus.json.
Corpus load_corpus(const std::filesystem::path& path);

std::map<std::string, ParticipantLabels> parse_labels_csv(const std::string& text,
                                                          const std::string& source = "labels");

std::string file_hash(const std::filesystem::path& path);

}  // namespace fidget
