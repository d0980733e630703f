#pragma once

// Independent reference computations used by the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "afbench/geometry.hpp"

namespace oracle {

using afbench::Point2;

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = len2 > 0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return afbench::distance(p, a + ab * t);
}

inline double distance_to_polyline(Point2 p, std::span<const Point2> poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) best = std::min(best, point_segment_distance(p, poly[i], poly[i + 1]));
  return best;
}

/// Symmetric 4-digit contour straight from the closed form, Selig order,
/// dense cosine spacing, thickness added vertically.
inline std::vector<Point2> naca4_dense(double m, double p, double t, int half) {
  auto thickness = [&](double x) {
    return 5.0 * t * (0.2969 * std::sqrt(x) - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x - 0.1015 * x * x * x * x);
  };
  auto camber = [&](double x) {
    if (m == 0.0) return 0.0;
    return x < p ? m / (p * p) * (2 * p * x - x * x) : m / ((1 - p) * (1 - p)) * ((1 - 2 * p) + 2 * p * x - x * x);
  };
  std::vector<Point2> pts;
  for (int i = half; i >= 0; --i) {
    const double x = 0.5 * (1.0 - std::cos(M_PI * i / half));
    pts.push_back({x, camber(x) + thickness(x)});
  }
  for (int i = 1; i <= half; ++i) {
    const double x = 0.5 * (1.0 - std::cos(M_PI * i / half));
    pts.push_back({x, camber(x) - thickness(x)});
  }
  return pts;
}

/// de Casteljau evaluation of a polynomial Bezier curve.
inline Point2 de_casteljau(std::vector<Point2> pts, double u) {
  for (std::size_t r = 1; r < pts.size(); ++r) {
    for (std::size_t i = 0; i + r < pts.size(); ++i) pts[i] = pts[i] * (1.0 - u) + pts[i + 1] * u;
  }
  return pts.front();
}

/// Perpendicular distance of p from the infinite line through a and b.
inline double line_distance(Point2 p, Point2 a, Point2 b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  return std::abs(cross) / afbench::distance(a, b);
}

}  // namespace oracle
