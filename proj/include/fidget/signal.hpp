#pragma once

#include <span>
#include <vector>

namespace fidget {

// Interpolating cubic spline with not-a-knot end conditions. Reproduces any
// cubic polynomial exactly. Requires at least 4 strictly increasing knots.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  std::size_t knots() const { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

// Least-squares convolution weights of a Savitzky-Golay smoother for the
// centre sample of a window. Weights are ordered from offset -half to +half.
std::vector<double> savgol_coefficients(int window, int polyorder);

// Savitzky-Golay smoothing with mirror padding at both ends
// (x[-k] = x[k], x[n-1+k] = x[n-1-k]). Requires x.size() >= window.
std::vector<double> savgol_filter(std::span<const double> x, int window, int polyorder);

// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

double mean(std::span<const double> v);
// Population standard deviation.
double stddev(std::span<const double> v);
double median(std::vector<double> values);

}  // namespace fidget
