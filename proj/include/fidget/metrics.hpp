#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fidget {

struct BinaryCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  double precision() const;  // 0 when nothing was predicted positive
  double recall() const;     // 0 when there are no positives
  double f1() const;         // 0 when undefined
  double accuracy() const;
};

BinaryCounts binary_counts(std::span<const int> predicted, std::span<const int> truth);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};
MeanStd mean_std(std::span<const double> v);

// Splits participant ids into `folds` disjoint groups. With labels, each
// class is shuffled separately and dealt round-robin so folds stay balanced.
// Deterministic for a given seed; throws DataError when folds > participants.
std::vector<std::vector<std::string>> partition_participants(
    std::vector<std::string> ids, int folds, std::uint64_t seed,
    const std::map<std::string, int>* labels = nullptr);

}  // namespace fidget
