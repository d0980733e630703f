#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "afbench/geometry.hpp"

namespace afbench {

enum class Parameterization { chord_length, centripetal, uniform };

/// Interpolating planar B-spline. Parameters are normalized to [0, 1]; knots
/// are clamped and placed by averaging the site parameters.
class SurfaceSpline {
 public:
  SurfaceSpline() = default;

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& sites() const { return sites_; }
  const std::vector<Point2>& control_points() const { return control_; }

  double t_min() const { return knots_.front(); }
  double t_max() const { return knots_.back(); }

  /// Order 0 returns the point, 1 and 2 the parametric derivatives.
  Point2 eval(double t, int order = 0) const;

  /// Point, first and second derivative in one pass.
  struct Jet {
    Point2 p, d1, d2;
  };
  Jet jet(double t) const;

 private:
  friend SurfaceSpline spline_fit(std::span<const Point2>, Parameterization, int);

  int degree_ = 3;
  std::vector<double> knots_;
  std::vector<double> sites_;
  std::vector<Point2> control_;

  std::size_t find_span(double t) const;
};

SurfaceSpline spline_fit(std::span<const Point2> points,
                         Parameterization parameterization = Parameterization::centripetal,
                         int degree = 3);

inline Point2 spline_eval(const SurfaceSpline& spline, double t, int order = 0) {
  return spline.eval(t, order);
}

/// |x'y'' - y'x''| / |r'|^3. Throws at stationary points.
double curvature_at(const SurfaceSpline& spline, double t);

/// d(y)/d(x) and d2(y)/d(x)2 along the curve, for graph-like segments.
double slope_dydx(const SurfaceSpline& spline, double t);
double second_derivative_d2ydx2(const SurfaceSpline& spline, double t);

/// Parameter of minimum x near interpolation site `site`, refined by bisection
/// on x'(t) in the two adjacent site intervals.
double min_x_parameter(const SurfaceSpline& spline, std::size_t site);

/// Arc length between a and b; assumes [a, b] lies inside one knot span or
/// that the curve is smooth enough for 5-point Gauss-Legendre on it.
double arc_length(const SurfaceSpline& spline, double a, double b);

/// Arc length from t_min to t by Gauss-Legendre quadrature per knot span.
std::vector<double> cumulative_arc_length(const SurfaceSpline& spline, std::span<const double> ts);

}  // namespace afbench
