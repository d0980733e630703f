#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afbench {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

enum class Provenance { uiuc, naca, cst_gen, bezier_gen, diffusion_gen, manual, edited };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

inline constexpr std::size_t kCanonicalPointCount = 257;
inline constexpr std::size_t kDefaultKeypointCount = 13;

/// Closed planar contour in Selig order: trailing edge, upper surface, leading
/// edge, lower surface, trailing edge. Invariants are checked by validate().
struct Airfoil {
  std::vector<Point2> points;
  std::string name;
  Provenance provenance = Provenance::manual;

  std::size_t size() const { return points.size(); }
};

/// Index of the minimum-x point; ties go to the smaller index.
std::size_t leading_edge_index(std::span<const Point2> points);

/// Returns a list of human-readable invariant violations; empty means valid.
/// `expected_count` of 0 skips the point-count check.
std::vector<std::string> validate(const Airfoil& airfoil,
                                  std::size_t expected_count = kCanonicalPointCount);

/// Shift so min x is 0 and scale uniformly so the chord is 1. y is not shifted.
std::vector<Point2> normalize_chord(std::span<const Point2> points);

struct ResampleOptions {
  bool cosine_spacing = true;
};

/// Brings a raw Selig-ordered contour to `n` points. Contours that already have
/// `n` points are normalized only; others are interpolated with a centripetal
/// cubic B-spline and resampled by arc length, cosine-clustered at both ends of
/// each surface.
Airfoil resample_airfoil(std::span<const Point2> raw_points, std::size_t n = kCanonicalPointCount,
                         const ResampleOptions& options = {});

std::vector<std::size_t> keypoint_indices(std::size_t point_count, std::size_t le_index,
                                          std::size_t count);

/// Uniform-stride subset of the contour that always contains both trailing-edge
/// endpoints and the leading-edge point.
std::vector<Point2> extract_keypoints(const Airfoil& airfoil,
                                      std::size_t count = kDefaultKeypointCount);

/// Negates y and reverses order so the result is again in Selig order.
Airfoil flip_y(const Airfoil& airfoil);

}  // namespace afbench
