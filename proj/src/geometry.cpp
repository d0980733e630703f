#include "afbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "afbench/error.hpp"
#include "afbench/spline.hpp"

namespace afbench {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::uiuc: return "uiuc";
    case Provenance::naca: return "naca";
    case Provenance::cst_gen: return "cst_gen";
    case Provenance::bezier_gen: return "bezier_gen";
    case Provenance::diffusion_gen: return "diffusion_gen";
    case Provenance::manual: return "manual";
    case Provenance::edited: return "edited";
  }
  return "manual";
}

Provenance provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::uiuc, Provenance::naca, Provenance::cst_gen, Provenance::bezier_gen,
                 Provenance::diffusion_gen, Provenance::manual, Provenance::edited}) {
    if (to_string(p) == s) return p;
  }
  throw Error(ErrorCode::parse_error, "unknown provenance '" + std::string(s) + "'");
}

std::size_t leading_edge_index(std::span<const Point2> points) {
  if (points.empty()) throw Error(ErrorCode::invalid_argument, "leading_edge_index: empty contour");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].x < points[best].x) best = i;
  }
  return best;
}

std::vector<std::string> validate(const Airfoil& airfoil, std::size_t expected_count) {
  std::vector<std::string> issues;
  const auto& pts = airfoil.points;
  if (expected_count != 0 && pts.size() != expected_count) {
    issues.push_back("expected " + std::to_string(expected_count) + " points, got " +
                     std::to_string(pts.size()));
  }
  if (pts.size() < 3) {
    issues.emplace_back("fewer than 3 points");
    return issues;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y)) {
      issues.push_back("non-finite coordinate at " + std::to_string(i));
      return issues;
    }
    if (pts[i].x < -1e-12 || pts[i].x > 1.0 + 1e-12) {
      issues.push_back("x outside [0, 1] at " + std::to_string(i));
    }
    if (i > 0 && pts[i] == pts[i - 1]) {
      issues.push_back("duplicate consecutive point at " + std::to_string(i));
    }
  }
  if (std::abs(pts.front().x - pts.back().x) > 1e-6) {
    issues.emplace_back("trailing-edge endpoints have different x");
  }
  const std::size_t le = leading_edge_index(pts);
  if (le == 0 || le + 1 == pts.size()) {
    issues.emplace_back("leading edge is not interior");
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    area2 += a.x * b.y - b.x * a.y;
  }
  if (!(area2 > 0.0)) issues.emplace_back("not in Selig order (contour is not counter-clockwise)");
  return issues;
}

std::vector<Point2> normalize_chord(std::span<const Point2> points) {
  if (points.empty()) throw Error(ErrorCode::invalid_argument, "normalize_chord: empty contour");
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const Point2& a, const Point2& b) { return a.x < b.x; });
  const double x0 = lo->x;
  const double chord = hi->x - lo->x;
  if (!(chord > 1e-12)) throw Error(ErrorCode::degenerate_geometry, "normalize_chord: zero chord");
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({(p.x - x0) / chord, p.y / chord});
  return out;
}

namespace {

void check_raw_contour(std::span<const Point2> raw) {
  if (raw.size() < 10) {
    throw Error(ErrorCode::invalid_argument,
                "resample_airfoil: need at least 10 points, got " + std::to_string(raw.size()));
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i].x) || !std::isfinite(raw[i].y)) {
      throw Error(ErrorCode::invalid_argument, "resample_airfoil: non-finite coordinate at point " +
                                                   std::to_string(i));
    }
    if (i > 0 && raw[i] == raw[i - 1]) {
      throw Error(ErrorCode::degenerate_geometry,
                  "resample_airfoil: duplicate consecutive point at " + std::to_string(i));
    }
  }
}

// Inverts cumulative arc length on a fine table, then polishes with Newton.
class ArcLengthInverse {
 public:
  explicit ArcLengthInverse(const SurfaceSpline& s) : spline_(s) {
    std::vector<double> breaks;
    for (double k : s.knots()) {
      if (breaks.empty() || k > breaks.back()) breaks.push_back(k);
    }
    constexpr int kSub = 8;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      for (int j = 0; j < kSub; ++j) {
        ts_.push_back(breaks[b] + (breaks[b + 1] - breaks[b]) * j / kSub);
      }
    }
    ts_.push_back(breaks.back());
    ss_ = cumulative_arc_length(s, ts_);
  }

  double total() const { return ss_.back(); }

  double arc_length_at(double t) const {
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    const std::size_t k = it == ts_.begin() ? 0 : static_cast<std::size_t>(it - ts_.begin()) - 1;
    return ss_[k] + arc_length(spline_, ts_[k], t);
  }

  double parameter_at(double s) const {
    if (s <= 0.0) return ts_.front();
    if (s >= ss_.back()) return ts_.back();
    auto it = std::upper_bound(ss_.begin(), ss_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - ss_.begin()) - 1;
    double a = ts_[k], b = ts_[k + 1];
    double t = a + (b - a) * (s - ss_[k]) / (ss_[k + 1] - ss_[k]);
    for (int it2 = 0; it2 < 30; ++it2) {
      const double f = arc_length_at(t) - s;
      if (std::abs(f) < 1e-14) break;
      (f > 0.0 ? b : a) = t;
      const double speed = norm(spline_.eval(t, 1));
      double next = speed > 0.0 ? t - f / speed : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      t = next;
    }
    return t;
  }

 private:
  const SurfaceSpline& spline_;
  std::vector<double> ts_;
  std::vector<double> ss_;
};

double spacing(double frac, bool cosine) {
  return cosine ? 0.5 * (1.0 - std::cos(std::numbers::pi * frac)) : frac;
}

}  // namespace

Airfoil resample_airfoil(std::span<const Point2> raw, std::size_t n, const ResampleOptions& options) {
  if (n < 65 || n % 2 == 0) {
    throw Error(ErrorCode::invalid_argument, "resample_airfoil: n must be odd and >= 65");
  }
  check_raw_contour(raw);
  Airfoil out;
  if (raw.size() == n) {
    out.points = normalize_chord(raw);
    return out;
  }

  const SurfaceSpline spline = spline_fit(raw, Parameterization::centripetal, 3);
  const ArcLengthInverse inverse(spline);
  const double total = inverse.total();
  const double t_le = min_x_parameter(spline, leading_edge_index(raw));
  const double s_le = inverse.arc_length_at(t_le);

  std::vector<double> targets;
  targets.reserve(n);
  const bool interior_le = s_le > 1e-9 * total && s_le < total * (1.0 - 1e-9);
  if (interior_le) {
    const std::size_t h = (n - 1) / 2;
    for (std::size_t k = 0; k <= h; ++k) {
      targets.push_back(s_le * spacing(static_cast<double>(k) / static_cast<double>(h), options.cosine_spacing));
    }
    for (std::size_t k = 1; k <= h; ++k) {
      targets.push_back(s_le + (total - s_le) * spacing(static_cast<double>(k) / static_cast<double>(h),
                                                        options.cosine_spacing));
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      targets.push_back(total * spacing(static_cast<double>(k) / static_cast<double>(n - 1), options.cosine_spacing));
    }
  }

  std::vector<Point2> pts;
  pts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0) {
      pts.push_back(raw.front());
    } else if (k + 1 == n) {
      pts.push_back(raw.back());
    } else if (interior_le && k == (n - 1) / 2) {
      pts.push_back(spline.eval(t_le));
    } else {
      pts.push_back(spline.eval(inverse.parameter_at(targets[k])));
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (distance(pts[k], pts[k - 1]) < 1e-14) {
      throw Error(ErrorCode::degenerate_geometry, "resample_airfoil: resampled points collapse at " +
                                                      std::to_string(k));
    }
  }
  out.points = normalize_chord(pts);
  return out;
}

std::vector<std::size_t> keypoint_indices(std::size_t point_count, std::size_t le_index,
                                          std::size_t count) {
  if (count < 3) throw Error(ErrorCode::invalid_argument, "extract_keypoints: count must be >= 3");
  if (count > point_count) {
    throw Error(ErrorCode::invalid_argument, "extract_keypoints: count exceeds point count");
  }
  std::vector<std::size_t> idx(count);
  for (std::size_t k = 0; k < count; ++k) {
    idx[k] = static_cast<std::size_t>(std::llround(static_cast<double>(k) * static_cast<double>(point_count - 1) /
                                                   static_cast<double>(count - 1)));
  }
  if (std::find(idx.begin(), idx.end(), le_index) == idx.end() && le_index > 0 &&
      le_index + 1 < point_count) {
    std::size_t best = 1;
    for (std::size_t k = 1; k + 1 < count; ++k) {
      const auto d = [&](std::size_t j) { return idx[j] > le_index ? idx[j] - le_index : le_index - idx[j]; };
      if (d(k) < d(best)) best = k;
    }
    idx[best] = le_index;
    if (!std::is_sorted(idx.begin(), idx.end()) ||
        std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
      throw Error(ErrorCode::invalid_argument, "extract_keypoints: cannot place leading edge");
    }
  }
  return idx;
}

std::vector<Point2> extract_keypoints(const Airfoil& airfoil, std::size_t count) {
  const auto idx = keypoint_indices(airfoil.size(), leading_edge_index(airfoil.points), count);
  std::vector<Point2> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(airfoil.points[i]);
  return out;
}

Airfoil flip_y(const Airfoil& airfoil) {
  Airfoil out = airfoil;
  std::reverse(out.points.begin(), out.points.end());
  for (auto& p : out.points) p.y = -p.y;
  return out;
}

}  // namespace afbench
