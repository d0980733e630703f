#include "afbench/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "afbench/error.hpp"
#include "afbench/spline.hpp"

namespace afbench {

std::array<double, kParsecCount> ParsecParams::to_array() const {
  return {r_le, x_up, y_up, zxx_up, x_lo, y_lo, zxx_lo, y_te, dy_te, alpha_te, beta_te};
}

ParsecParams ParsecParams::from_array(const std::array<double, kParsecCount>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
}

const std::array<std::string_view, kParsecCount>& parsec_names() {
  static constexpr std::array<std::string_view, kParsecCount> names = {
      "r_le", "x_up", "y_up", "zxx_up", "x_lo", "y_lo", "zxx_lo", "y_te", "dy_te", "alpha_te", "beta_te"};
  return names;
}

std::size_t parsec_index(std::string_view name) {
  const auto& names = parsec_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::invalid_argument, "unknown PARSEC parameter '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

ParsecTargets full_targets(const ParsecParams& p) {
  ParsecTargets t;
  const auto v = p.to_array();
  for (std::size_t i = 0; i < kParsecCount; ++i) t[i] = v[i];
  return t;
}

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Crest {
  double x, y, zxx;
};

// Extremum of y over x on a surface spline running leading edge -> trailing edge.
// `sign` is +1 for a maximum (upper), -1 for a minimum (lower).
Crest find_crest(const SurfaceSpline& s, int sign, const char* label) {
  auto dy = [&](double t) { return sign * s.eval(t, 1).y; };
  std::vector<double> samples;
  const auto& sites = s.sites();
  for (std::size_t i = 0; i + 1 < sites.size(); ++i) {
    samples.push_back(sites[i]);
    samples.push_back(0.5 * (sites[i] + sites[i + 1]));
  }
  samples.push_back(sites.back());

  bool found = false;
  Crest best{};
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    double a = samples[i], b = samples[i + 1];
    if (!(dy(a) > 0.0 && dy(b) < 0.0)) continue;
    while (b - a > 1e-14) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      (dy(m) > 0.0 ? a : b) = m;
    }
    const double t = 0.5 * (a + b);
    const Point2 p = s.eval(t);
    if (!(p.x > 0.0 && p.x < 1.0)) continue;
    if (!found || sign * p.y > sign * best.y) {
      best = {p.x, p.y, second_derivative_d2ydx2(s, t)};
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::degenerate_geometry,
                std::string("annotate_parsec: no interior extremum on the ") + label + " surface");
  }
  return best;
}

}  // namespace

ParsecParams annotate_parsec(const Airfoil& airfoil) {
  const auto& pts = airfoil.points;
  if (pts.size() < 10) throw Error(ErrorCode::invalid_argument, "annotate_parsec: too few points");
  const std::size_t le = leading_edge_index(pts);
  if (le < 3 || le + 4 > pts.size()) {
    throw Error(ErrorCode::degenerate_geometry, "annotate_parsec: leading edge too close to an endpoint");
  }

  std::vector<Point2> upper(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(le) + 1);
  std::reverse(upper.begin(), upper.end());
  const std::vector<Point2> lower(pts.begin() + static_cast<std::ptrdiff_t>(le), pts.end());

  const SurfaceSpline su = spline_fit(upper, Parameterization::centripetal, 3);
  const SurfaceSpline sl = spline_fit(lower, Parameterization::centripetal, 3);
  const SurfaceSpline contour = spline_fit(pts, Parameterization::centripetal, 3);

  ParsecParams out;
  const double t_le = min_x_parameter(contour, le);
  out.r_le = 1.0 / curvature_at(contour, t_le);

  const Crest cu = find_crest(su, +1, "upper");
  const Crest cl = find_crest(sl, -1, "lower");
  out.x_up = cu.x;
  out.y_up = cu.y;
  out.zxx_up = cu.zxx;
  out.x_lo = cl.x;
  out.y_lo = cl.y;
  out.zxx_lo = cl.zxx;

  out.y_te = 0.5 * (pts.front().y + pts.back().y);
  out.dy_te = std::abs(pts.front().y - pts.back().y);

  const Point2 du = su.eval(su.t_max(), 1);
  const Point2 dl = sl.eval(sl.t_max(), 1);
  out.alpha_te = -std::atan2(du.y, du.x) * kDeg;
  out.beta_te = std::atan2(dl.y, dl.x) * kDeg;
  return out;
}

SigmaReport label_error(const ParsecParams& predicted, const ParsecParams& target) {
  const auto p = predicted.to_array();
  const auto q = target.to_array();
  SigmaReport r;
  double sum = 0.0;
  for (std::size_t i = 0; i < kParsecCount; ++i) {
    r.sigma[i] = std::abs(p[i] - q[i]);
    sum += r.sigma[i];
  }
  r.sigma_bar = sum / static_cast<double>(kParsecCount);
  return r;
}

SigmaReport mean_label_error(std::span<const SigmaReport> reports) {
  SigmaReport out;
  if (reports.empty()) return out;
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < kParsecCount; ++i) out.sigma[i] += r.sigma[i];
    out.sigma_bar += r.sigma_bar;
  }
  const auto k = static_cast<double>(reports.size());
  for (auto& s : out.sigma) s /= k;
  out.sigma_bar /= k;
  return out;
}

}  // namespace afbench
