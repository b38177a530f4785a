#include "fidget/signal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fidget {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw std::invalid_argument("spline: x and y differ in length");
  if (n < 4) throw std::invalid_argument("spline: not-a-knot needs at least 4 knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline: knots must increase");

  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

  // Unknowns M_1 .. M_{n-2}; M_0 and M_{n-1} are eliminated through the
  // not-a-knot conditions (third derivative continuous at x_1 and x_{n-2}).
  const std::size_t m = n - 2;
  std::vector<double> sub(m, 0.0), diag(m, 0.0), sup(m, 0.0), rhs(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    sub[k] = h[i - 1];
    diag[k] = 2.0 * (h[i - 1] + h[i]);
    sup[k] = h[i];
    rhs[k] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
  }
  // M_0 = M_1 (1 + h0/h1) - M_2 h0/h1
  {
    const double r = h[0] / h[1];
    diag[0] += sub[0] * (1.0 + r);
    sup[0] -= sub[0] * r;
    sub[0] = 0.0;
  }
  // M_{n-1} = M_{n-2} (1 + h_{n-2}/h_{n-3}) - M_{n-3} h_{n-2}/h_{n-3}
  {
    const double r = h[n - 2] / h[n - 3];
    diag[m - 1] += sup[m - 1] * (1.0 + r);
    sub[m - 1] -= sup[m - 1] * r;
    sup[m - 1] = 0.0;
  }

  std::vector<double> inner(m);
  if (m == 2) {
    // Both end rows were rewritten; solve the 2x2 system directly.
    const double det = diag[0] * diag[1] - sup[0] * sub[1];
    inner[0] = (rhs[0] * diag[1] - sup[0] * rhs[1]) / det;
    inner[1] = (diag[0] * rhs[1] - sub[1] * rhs[0]) / det;
  } else {
    // Thomas algorithm.
    std::vector<double> c(m), d(m);
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t k = 1; k < m; ++k) {
      const double denom = diag[k] - sub[k] * c[k - 1];
      c[k] = sup[k] / denom;
      d[k] = (rhs[k] - sub[k] * d[k - 1]) / denom;
    }
    inner[m - 1] = d[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) inner[k] = d[k] - c[k] * inner[k + 1];
  }

  m_.assign(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) m_[k + 1] = inner[k];
  {
    const double r = h[0] / h[1];
    m_[0] = m_[1] * (1.0 + r) - m_[2] * r;
  }
  {
    const double r = h[n - 2] / h[n - 3];
    m_[n - 1] = m_[n - 2] * (1.0 + r) - m_[n - 3] * r;
  }
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  std::size_t i = 0;
  if (x <= x_.front()) {
    i = 0;
  } else if (x >= x_.back()) {
    i = n - 2;
  } else {
    i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  }
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

std::vector<double> savgol_coefficients(int window, int polyorder) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("savgol: window must be odd and positive");
  if (polyorder < 0 || polyorder >= window) throw std::invalid_argument("savgol: polyorder must be < window");
  const int half = window / 2;
  Eigen::MatrixXd design(window, polyorder + 1);
  for (int r = 0; r < window; ++r) {
    const double t = static_cast<double>(r - half);
    double p = 1.0;
    for (int c = 0; c <= polyorder; ++c) {
      design(r, c) = p;
      p *= t;
    }
  }
  // Row 0 of (A^T A)^{-1} A^T evaluates the fitted polynomial at offset 0.
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(polyorder + 1, 0);
  const Eigen::VectorXd w = gram.ldlt().solve(e0);
  const Eigen::VectorXd coeffs = design * w;
  return {coeffs.data(), coeffs.data() + coeffs.size()};
}

std::vector<double> savgol_filter(std::span<const double> x, int window, int polyorder) {
  const auto coeffs = savgol_coefficients(window, polyorder);
  const long n = static_cast<long>(x.size());
  if (n < window) throw std::invalid_argument("savgol: signal shorter than window");
  const long half = window / 2;
  auto at = [&](long j) {
    if (j < 0) j = -j;
    if (j >= n) j = 2 * (n - 1) - j;
    return x[static_cast<std::size_t>(j)];
  };
  std::vector<double> out(x.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -half; k <= half; ++k) acc += coeffs[static_cast<std::size_t>(k + half)] * at(i + k);
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mu = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

}  // namespace fidget
