#include "fidget/metrics.hpp"

#include "fidget/errors.hpp"
#include "fidget/random.hpp"

#include <algorithm>
#include <cmath>

namespace fidget {

double BinaryCounts::precision() const {
  return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
}

double BinaryCounts::recall() const {
  return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
}

double BinaryCounts::f1() const {
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

double BinaryCounts::accuracy() const {
  const std::size_t n = tp + fp + tn + fn;
  return n ? static_cast<double>(tp + tn) / static_cast<double>(n) : 0.0;
}

BinaryCounts binary_counts(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DataError("binary_counts: length mismatch");
  BinaryCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      predicted[i] ? ++c.tp : ++c.fn;
    } else {
      predicted[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

MeanStd mean_std(std::span<const double> v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(acc / static_cast<double>(v.size()));
  return r;
}

std::vector<std::vector<std::string>> partition_participants(std::vector<std::string> ids, int folds,
                                                             std::uint64_t seed,
                                                             const std::map<std::string, int>* labels) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > ids.size()) {
    throw DataError("cannot split " + std::to_string(ids.size()) + " participants into " +
                    std::to_string(folds) + " folds");
  }
  Rng rng(seed);
  std::vector<std::vector<std::string>> strata;
  if (labels) {
    std::map<int, std::vector<std::string>> by_label;
    for (const auto& id : ids) {
      auto it = labels->find(id);
      if (it == labels->end()) throw DataError("no label for participant " + id);
      by_label[it->second].push_back(id);
    }
    for (auto& [label, members] : by_label) strata.push_back(std::move(members));
  } else {
    strata.push_back(ids);
  }
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(folds));
  std::size_t next = 0;
  for (auto& members : strata) {
    rng.shuffle(members);
    for (auto& id : members) out[next++ % out.size()].push_back(std::move(id));
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

}  // namespace fidget
