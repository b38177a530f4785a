#pragma once

#include <stdexcept>
#include <string>

namespace fidget {

// Malformed input file. The message names the file, line (or frame) and field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Keypoint schema violations and cross-file inconsistencies.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (unknown key, out-of-range value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data that parses but cannot be processed (too short, single class, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing, corrupt or mismatched model artifacts.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a fitted stage consumed rows from a held-out participant.
class LeakError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Process exit codes of the command-line front end.
enum class ExitCode : int { kOk = 0, kConfig = 2, kData = 3, kModel = 4 };

ExitCode exit_code_for(const std::exception& e);

}  // namespace fidget
