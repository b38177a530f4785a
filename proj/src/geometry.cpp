#include "fidget/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fidget {

namespace {

constexpr double kMinHalfExtent = 1e-9;

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

// Projection radius of a box onto a unit direction.
double radius(const LimbBox& b, Point2 dir) {
  const Point2 perp{-b.axis.y, b.axis.x};
  return b.half_length * std::abs(dot(b.axis, dir)) + b.half_width * std::abs(dot(perp, dir));
}

}  // namespace

LimbBox LimbBox::bounding(std::span<const Point2> points) {
  if (points.empty()) throw std::invalid_argument("bounding box of no points");
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& p : points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  LimbBox b;
  b.center = {(x0 + x1) / 2.0, (y0 + y1) / 2.0};
  b.axis = {1.0, 0.0};
  b.half_length = std::max((x1 - x0) / 2.0, kMinHalfExtent);
  b.half_width = std::max((y1 - y0) / 2.0, kMinHalfExtent);
  b.axis_aligned = true;
  return b;
}

LimbBox LimbBox::segment(Point2 a, Point2 b, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("limb box width must be positive");
  LimbBox box;
  box.center = {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  box.half_width = width / 2.0;
  if (len < 1e-12) {
    box.axis = {1.0, 0.0};
    box.half_length = width / 2.0;
    box.axis_aligned = true;
  } else {
    box.axis = {dx / len, dy / len};
    box.half_length = len / 2.0;
    box.axis_aligned = std::abs(box.axis.y) < 1e-15;
  }
  return box;
}

std::array<Point2, 4> LimbBox::corners() const {
  const Point2 u{axis.x * half_length, axis.y * half_length};
  const Point2 v{-axis.y * half_width, axis.x * half_width};
  return {Point2{center.x - u.x - v.x, center.y - u.y - v.y},
          Point2{center.x + u.x - v.x, center.y + u.y - v.y},
          Point2{center.x + u.x + v.x, center.y + u.y + v.y},
          Point2{center.x - u.x + v.x, center.y - u.y + v.y}};
}

double LimbBox::diagonal() const { return 2.0 * std::hypot(half_length, half_width); }

bool overlaps(const LimbBox& a, const LimbBox& b) {
  const Point2 d{b.center.x - a.center.x, b.center.y - a.center.y};
  if (a.axis_aligned && b.axis_aligned) {
    return std::abs(d.x) <= a.half_length + b.half_length && std::abs(d.y) <= a.half_width + b.half_width;
  }
  const Point2 axes[4] = {a.axis, {-a.axis.y, a.axis.x}, b.axis, {-b.axis.y, b.axis.x}};
  for (const auto& ax : axes) {
    if (std::abs(dot(d, ax)) > radius(a, ax) + radius(b, ax)) return false;
  }
  return true;
}

}  // namespace fidget
