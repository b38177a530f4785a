#include "fidget/errors.hpp"

namespace fidget {

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return ExitCode::kConfig;
  if (dynamic_cast<const ModelError*>(&e)) return ExitCode::kModel;
  return ExitCode::kData;
}

}  // namespace fidget
