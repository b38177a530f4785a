#include "fidget/analysis.hpp"

#include "fidget/errors.hpp"
#include "fidget/linear.hpp"
#include "fidget/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace fidget {

std::vector<double> average_fidget(const FidgetMatrix& m) {
  const std::size_t n = m.frames();
  if (n == 0) throw DataError("average_fidget: matrix has no frames");
  std::vector<double> out;
  for (const auto& row : m.rows) {
    std::size_t ones = 0;
    for (auto v : row) ones += v ? 1 : 0;
    out.push_back(static_cast<double>(ones) / static_cast<double>(n));
  }
  return out;
}

namespace {

void check_folds(const Eigen::MatrixXd& x, const std::vector<int>& y, const std::vector<std::vector<std::size_t>>& folds) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DataError("linear analysis: feature/label row mismatch");
  if (folds.size() < 2) throw DataError("linear analysis needs at least two folds");
  for (const auto& f : folds) {
    if (f.empty()) throw DataError("linear analysis: empty fold");
    for (auto i : f)
      if (i >= y.size()) throw DataError("linear analysis: fold row out of range");
  }
}

std::vector<std::size_t> train_rows(const std::vector<std::vector<std::size_t>>& folds, std::size_t f) {
  std::vector<std::size_t> rows;
  for (std::size_t o = 0; o < folds.size(); ++o)
    if (o != f) rows.insert(rows.end(), folds[o].begin(), folds[o].end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

LinearResult linear_classify(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             const std::vector<std::vector<std::size_t>>& folds) {
  check_folds(x, y, folds);
  LinearResult res;
  std::vector<double> f1s;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto tr = train_rows(folds, f);
    Eigen::MatrixXd xt(static_cast<Eigen::Index>(tr.size()), x.cols());
    Eigen::VectorXd yt(static_cast<Eigen::Index>(tr.size()));
    for (std::size_t i = 0; i < tr.size(); ++i) {
      xt.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(tr[i]));
      yt(static_cast<Eigen::Index>(i)) = y[tr[i]];
    }
    const auto fit = least_squares(xt, yt);
    std::vector<int> pred, truth;
    for (auto i : folds[f]) {
      const double out = fit.intercept + x.row(static_cast<Eigen::Index>(i)).dot(fit.coefficients);
      pred.push_back(out > 0.5 ? 1 : 0);
      truth.push_back(y[i]);
    }
    LinearFoldResult fr;
    fr.coefficients.assign(fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());
    fr.intercept = fit.intercept;
    fr.ridge = fit.ridge;
    fr.f1 = binary_counts(pred, truth).f1();
    f1s.push_back(fr.f1);
    res.folds.push_back(std::move(fr));
  }
  const auto ms = mean_std(f1s);
  res.f1_mean = ms.mean;
  res.f1_std = ms.std;
  return res;
}

const char* polarity_token(Polarity p) {
  switch (p) {
    case Polarity::kPositive: return "+";
    case Polarity::kNegative: return "¬";
    case Polarity::kNeutral: return "/";
    case Polarity::kInconsistent: return "?";
  }
  return "?";
}

Polarity polarity(const std::vector<double>& c, double tol) {
  if (c.size() < 2) throw std::invalid_argument("polarity needs coefficients from at least two folds");
  if (std::all_of(c.begin(), c.end(), [tol](double v) { return v > tol; })) return Polarity::kPositive;
  if (std::all_of(c.begin(), c.end(), [tol](double v) { return v < -tol; })) return Polarity::kNegative;
  if (std::all_of(c.begin(), c.end(), [tol](double v) { return std::abs(v) < tol; })) return Polarity::kNeutral;
  return Polarity::kInconsistent;
}

std::vector<PolarityEntry> polarity_report(const LinearResult& result, const std::vector<std::string>& names,
                                           double tol) {
  std::vector<PolarityEntry> out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<double> c;
    for (const auto& f : result.folds) {
      if (f.coefficients.size() != names.size()) throw std::invalid_argument("polarity: name count mismatch");
      c.push_back(f.coefficients[j]);
    }
    out.push_back({names[j], polarity(c, tol)});
  }
  return out;
}

std::string format_polarity(const std::vector<PolarityEntry>& report) {
  std::string s;
  for (const auto& e : report) {
    if (!s.empty()) s += ' ';
    s += e.feature + polarity_token(e.token);
  }
  return s;
}

bool better_subset(const SubsetScore& a, const SubsetScore& b) {
  if (a.f1_mean != b.f1_mean) return a.f1_mean > b.f1_mean;
  if (a.features.size() != b.features.size()) return a.features.size() < b.features.size();
  return a.features < b.features;
}

namespace {

constexpr int kMaxSearchFeatures = 64;

// Per-fold centred sufficient statistics for fast subset fits.
struct FoldStats {
  int p = 0;
  double ybar = 0.0;
  std::vector<double> gram;  // p x p, row-major
  std::vector<double> rhs;   // p
  std::vector<double> test;  // test rows centred by the training mean, row-major
  std::vector<int> truth;
};

class SubsetEvaluator {
 public:
  SubsetEvaluator(const Eigen::MatrixXd& x, const std::vector<int>& y,
                  const std::vector<std::vector<std::size_t>>& folds) {
    const auto p = static_cast<int>(x.cols());
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto tr = train_rows(folds, f);
      FoldStats s;
      s.p = p;
      Eigen::MatrixXd xt(static_cast<Eigen::Index>(tr.size()), p);
      Eigen::VectorXd yt(static_cast<Eigen::Index>(tr.size()));
      for (std::size_t i = 0; i < tr.size(); ++i) {
        xt.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(tr[i]));
        yt(static_cast<Eigen::Index>(i)) = y[tr[i]];
      }
      const Eigen::RowVectorXd mu = xt.colwise().mean();
      s.ybar = yt.mean();
      const Eigen::MatrixXd xc = xt.rowwise() - mu;
      const Eigen::VectorXd yc = yt.array() - s.ybar;
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> g = xc.transpose() * xc;
      s.gram.assign(g.data(), g.data() + g.size());
      const Eigen::VectorXd r = xc.transpose() * yc;
      s.rhs.assign(r.data(), r.data() + r.size());
      for (auto i : folds[f]) {
        for (int j = 0; j < p; ++j) s.test.push_back(x(static_cast<Eigen::Index>(i), j) - mu(j));
        s.truth.push_back(y[i]);
      }
      stats_.push_back(std::move(s));
    }
  }

  SubsetScore evaluate(const std::vector<int>& features) {
    SubsetScore out;
    out.features = features;
    const int k = static_cast<int>(features.size());
    double sum = 0.0;
    for (const auto& s : stats_) {
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) gram_[a * k + b] = s.gram[features[a] * s.p + features[b]];
        beta_[a] = s.rhs[features[a]];
      }
      std::copy(gram_.begin(), gram_.begin() + k * k, work_.begin());
      if (!cholesky_solve(work_.data(), beta_.data(), k)) {
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) work_[a * k + b] = gram_[a * k + b];
          work_[a * k + a] += 1e-6;
          beta_[a] = s.rhs[features[a]];
        }
        cholesky_solve(work_.data(), beta_.data(), k, 0.0);
      }
      BinaryCounts c;
      for (std::size_t t = 0; t < s.truth.size(); ++t) {
        double v = s.ybar;
        const double* row = &s.test[t * static_cast<std::size_t>(s.p)];
        for (int a = 0; a < k; ++a) v += beta_[a] * row[features[a]];
        const int pred = v > 0.5 ? 1 : 0;
        if (pred == 1) (s.truth[t] == 1 ? c.tp : c.fp) += 1;
        else (s.truth[t] == 1 ? c.fn : c.tn) += 1;
      }
      const double f1 = c.f1();
      out.fold_f1.push_back(f1);
      sum += f1;
    }
    out.f1_mean = sum / static_cast<double>(stats_.size());
    return out;
  }

 private:
  std::vector<FoldStats> stats_;
  std::array<double, kMaxSearchFeatures * kMaxSearchFeatures> gram_{};
  std::array<double, kMaxSearchFeatures * kMaxSearchFeatures> work_{};
  std::array<double, kMaxSearchFeatures> beta_{};
};

std::vector<int> mask_features(std::uint64_t mask) {
  std::vector<int> f;
  for (int j = 0; mask; ++j, mask >>= 1)
    if (mask & 1) f.push_back(j);
  return f;
}

}  // namespace

SearchResult feature_search(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            const std::vector<std::vector<std::size_t>>& folds,
                            const std::vector<std::string>& names, const SearchConfig& config) {
  check_folds(x, y, folds);
  const auto p = static_cast<int>(x.cols());
  if (p < 1) throw DataError("feature search needs at least one candidate feature");
  if (p > kMaxSearchFeatures) throw DataError("feature search supports at most 64 candidates");
  if (static_cast<int>(names.size()) != p) throw std::invalid_argument("feature search: name count mismatch");
  SubsetEvaluator eval(x, y, folds);
  SearchResult res;
  bool have_best = false;
  const auto consider = [&](SubsetScore s) {
    ++res.evaluated;
    if (!have_best || better_subset(s, res.best)) {
      res.best = s;
      have_best = true;
    }
    return s;
  };

  if (p <= config.exhaustive_limit) {
    const std::uint64_t count = std::uint64_t{1} << p;
    res.exhaustive_f1.assign(count, 0.0);
    for (std::uint64_t mask = 1; mask < count; ++mask) {
      auto s = eval.evaluate(mask_features(mask));
      res.exhaustive_f1[mask] = s.f1_mean;
      consider(std::move(s));
    }
  } else {
    res.approximate = true;
    if (config.beam_width <= 0) throw ConfigError("beam_width must be positive");
    std::set<std::uint64_t> seen;
    std::vector<std::pair<SubsetScore, std::uint64_t>> beam;
    for (int j = 0; j < p; ++j) {
      const std::uint64_t m = std::uint64_t{1} << j;
      seen.insert(m);
      auto s = consider(eval.evaluate({j}));
      res.log.push_back(s);
      beam.emplace_back(std::move(s), m);
    }
    const auto trim = [&config](std::vector<std::pair<SubsetScore, std::uint64_t>>& v) {
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return better_subset(a.first, b.first); });
      if (v.size() > static_cast<std::size_t>(config.beam_width)) v.resize(static_cast<std::size_t>(config.beam_width));
    };
    trim(beam);
    while (!beam.empty()) {
      std::vector<std::pair<SubsetScore, std::uint64_t>> next;
      for (const auto& [score, mask] : beam) {
        for (int j = 0; j < p; ++j) {
          const std::uint64_t m = mask | (std::uint64_t{1} << j);
          if (m == mask || !seen.insert(m).second) continue;
          auto s = consider(eval.evaluate(mask_features(m)));
          res.log.push_back(s);
          next.emplace_back(std::move(s), m);
        }
      }
      trim(next);
      beam = std::move(next);
    }
  }
  for (int j : res.best.features) res.best_names.push_back(names[static_cast<std::size_t>(j)]);
  return res;
}

AlphaResult krippendorff_alpha(const std::vector<int>& a, const std::vector<int>& b,
                               const std::vector<int>& categories) {
  if (a.size() != b.size()) throw std::invalid_argument("krippendorff_alpha: label arrays differ in length");
  std::map<int, std::size_t> index;
  for (int c : categories) index.emplace(c, index.size());
  const std::size_t k = index.size();
  std::vector<double> o(k * k, 0.0);
  const auto at = [&index](int v) {
    auto it = index.find(v);
    if (it == index.end()) throw std::invalid_argument("krippendorff_alpha: label " + std::to_string(v) +
                                                       " is not a listed category");
    return it->second;
  };
  for (std::size_t u = 0; u < a.size(); ++u) {
    const auto i = at(a[u]), j = at(b[u]);
    o[i * k + j] += 1.0;
    o[j * k + i] += 1.0;
  }
  std::vector<double> nc(k, 0.0);
  double n = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      nc[i] += o[i * k + j];
      n += o[i * k + j];
    }
  double observed = 0.0, expected = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) {
        observed += o[i * k + j];
        expected += nc[i] * nc[j];
      }
  AlphaResult r;
  if (expected <= 0.0 || n < 2.0) {
    r.degenerate = true;
    r.alpha = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.alpha = 1.0 - (n - 1.0) * observed / expected;
  return r;
}

}  // namespace fidget
