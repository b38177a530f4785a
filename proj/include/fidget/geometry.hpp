#pragma once

#include "fidget/pose.hpp"

#include <array>
#include <span>

namespace fidget {

// Oriented rectangle: centre, unit long axis, half extents along the axis and
// across it. Hand and face boxes are axis-aligned (axis = +x).
struct LimbBox {
  Point2 center;
  Point2 axis{1.0, 0.0};
  double half_length = 0.0;
  double half_width = 0.0;
  bool axis_aligned = true;

  // Smallest axis-aligned box containing the points.
  static LimbBox bounding(std::span<const Point2> points);
  // Box whose long sides run parallel to a -> b, spanning the segment, with
  // the given full width. Coincident joints give a width x width square.
  static LimbBox segment(Point2 a, Point2 b, double width);

  std::array<Point2, 4> corners() const;
  double diagonal() const;
};

// Closed-set intersection (touching boxes overlap). Separating-axis test over
// the four edge normals, with an interval fast path when both boxes are
// axis-aligned.
bool overlaps(const LimbBox& a, const LimbBox& b);

}  // namespace fidget
