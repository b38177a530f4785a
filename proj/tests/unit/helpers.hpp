#pragma once

#include "fidget/pose.hpp"
#include "fidget/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

namespace testutil {

// Fresh directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fidget_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-12, std::abs(a), std::abs(b)}); }

}  // namespace testutil
