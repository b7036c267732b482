#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fjvrp/errors.hpp"

namespace fjvrp {

// Planar point. x is longitude in degrees, y is latitude in degrees.
// Coordinates are treated as a flat plane; a single degrees-to-miles factor
// is applied after the fact, so no projection happens here.
struct Point {
  double x = 0.0;
  double y = 0.0;

  Point() = default;
  Point(double x_, double y_) : x(x_), y(y_) {
    if (!std::isfinite(x) || !std::isfinite(y))
      throw Error("Point: coordinates must be finite");
  }
};

inline bool operator==(const Point& a, const Point& b) {
  return a.x == b.x && a.y == b.y;
}
inline bool operator!=(const Point& a, const Point& b) { return !(a == b); }

inline bool lex_less(const Point& a, const Point& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

inline double euclid_dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Cross product of (b - a) x (c - a). Positive when c lies strictly to the
// left of the directed line a -> b.
inline double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Convex hull corner list, counterclockwise, starting at the
// lexicographically least corner. Collinear boundary points are excluded,
// so every corner is a strict vertex. Inputs with fewer than three distinct
// points, or all-collinear inputs, yield a degenerate hull of one or two
// extreme points.
struct Hull {
  std::vector<Point> corners;
};

// Monotone chain. Sorting makes the result independent of input order.
inline Hull convex_hull(std::vector<Point> pts) {
  if (pts.empty()) throw EmptyPointSet();
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return Hull{std::move(pts)};

  std::vector<Point> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);  // last point repeats the first
  return Hull{std::move(h)};
}

// Mean of 69 miles per degree of latitude and 54.6 miles per degree of
// longitude at the operating latitude.
inline constexpr double kMilesPerDegree = 61.8;

inline double degrees_to_miles(double d) {
  if (d < 0.0) throw NegativeLength(d);
  return d * kMilesPerDegree;
}

}  // namespace fjvrp
