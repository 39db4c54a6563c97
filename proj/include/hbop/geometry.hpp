#pragma once

#include <cmath>

namespace hbop {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Scanline order: top-to-bottom, then left-to-right. Used for every
/// deterministic tie-break on lattice points.
inline bool scanline_less(const Point& a, const Point& b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

/// Fold an arbitrary angle into the axis range [0, pi). Lines have no
/// direction, so angles differing by pi are the same axis.
inline double fold_axis_angle(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;  // fmod rounding at the seam
  return r;
}

/// Circular difference between two axis angles in [0, pi).
inline double axis_angle_diff(double a, double b) {
  double d = std::fabs(a - b);
  return std::min(d, kPi - d);
}

}  // namespace hbop
