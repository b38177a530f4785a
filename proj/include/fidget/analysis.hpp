#pragma once

#include "fidget/fidgets.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace fidget {

// Fraction of frames each row is active.
std::vector<double> average_fidget(const FidgetMatrix& m);

// Rows are participants; fold i holds the participant rows listed in folds[i].
struct LinearFoldResult {
  std::vector<double> coefficients;
  double intercept = 0.0;
  bool ridge = false;
  double f1 = 0.0;
};

struct LinearResult {
  std::vector<LinearFoldResult> folds;
  double f1_mean = 0.0, f1_std = 0.0;
};

// Least squares on {0,1} targets, class 1 when the fitted output exceeds 0.5.
// Throws DataError when folds are empty or cover no rows.
LinearResult linear_classify(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             const std::vector<std::vector<std::size_t>>& folds);

// + all folds above tol, "¬" all below -tol, / all within tol, ? otherwise.
enum class Polarity { kPositive, kNegative, kNeutral, kInconsistent };
const char* polarity_token(Polarity p);
Polarity polarity(const std::vector<double>& fold_coefficients, double tol = 1e-3);

struct PolarityEntry {
  std::string feature;
  Polarity token = Polarity::kInconsistent;
};
std::vector<PolarityEntry> polarity_report(const LinearResult& result, const std::vector<std::string>& names,
                                           double tol = 1e-3);
// Space-separated "name+token" list, e.g. "He-GL+ Hn-GS¬".
std::string format_polarity(const std::vector<PolarityEntry>& report);

struct SubsetScore {
  std::vector<int> features;  // ascending
  double f1_mean = 0.0;
  std::vector<double> fold_f1;
};

struct SearchConfig {
  int exhaustive_limit = 20;  // exact enumeration up to this many candidates
  int beam_width = 50;
};

struct SearchResult {
  SubsetScore best;
  std::vector<std::string> best_names;
  bool approximate = false;
  std::size_t evaluated = 0;
  // Exhaustive runs: mean F1 indexed by feature bitmask (entry 0 unused).
  std::vector<double> exhaustive_f1;
  // Beam runs: every evaluated subset in evaluation order.
  std::vector<SubsetScore> log;
};

// Orders subsets by mean F1 descending, then size ascending, then
// lexicographically.
bool better_subset(const SubsetScore& a, const SubsetScore& b);

SearchResult feature_search(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            const std::vector<std::vector<std::size_t>>& folds,
                            const std::vector<std::string>& names, const SearchConfig& config = {});

struct AlphaResult {
  double alpha = 0.0;
  bool degenerate = false;  // no expected disagreement; alpha undefined
};

// Nominal Krippendorff alpha for two coders without missing values.
// Throws std::invalid_argument on length mismatch or labels outside
// `categories`.
AlphaResult krippendorff_alpha(const std::vector<int>& a, const std::vector<int>& b,
                               const std::vector<int>& categories);

}  // namespace fidget
