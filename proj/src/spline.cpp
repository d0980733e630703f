#include "afbench/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "afbench/error.hpp"

namespace afbench {
namespace {

constexpr int kMaxDegree = 7;

// Basis functions and their first two derivatives at t for the given span
// (Piegl & Tiller, A2.3). ders[k][j] is the k-th derivative of N_{span-p+j}.
void basis_derivatives(const std::vector<double>& knots, std::size_t span, double t, int p,
                       int max_order, std::array<std::array<double, kMaxDegree + 1>, 3>& ders) {
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> ndu{};
  std::array<double, kMaxDegree + 1> left{}, right{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];

  std::array<std::array<double, kMaxDegree + 1>, 2> a{};
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= max_order; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= max_order; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= factor;
    factor *= (p - k);
  }
}

std::vector<double> site_parameters(std::span<const Point2> pts, Parameterization kind) {
  const std::size_t n = pts.size();
  std::vector<double> u(n, 0.0);
  if (kind == Parameterization::uniform) {
    for (std::size_t k = 0; k < n; ++k) u[k] = static_cast<double>(k) / static_cast<double>(n - 1);
    return u;
  }
  double total = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double d = distance(pts[k], pts[k - 1]);
    if (kind == Parameterization::centripetal) d = std::sqrt(d);
    if (!(d > 0.0)) {
      throw Error(ErrorCode::degenerate_geometry,
                  "spline_fit: repeated parameter site at point " + std::to_string(k));
    }
    total += d;
    u[k] = total;
  }
  for (auto& v : u) v /= total;
  u.back() = 1.0;
  return u;
}

// Banded Gaussian elimination without pivoting. B-spline collocation matrices
// are totally positive, so this is stable.
class BandMatrix {
 public:
  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), w_(kl + ku + 1), data_(n * w_, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * w_ + (j + kl_ - i)]; }

  void solve(std::vector<Point2>& rhs) {
    for (std::size_t k = 0; k < n_; ++k) {
      const double pivot = at(k, k);
      if (std::abs(pivot) < 1e-300) {
        throw Error(ErrorCode::degenerate_geometry, "spline_fit: singular collocation matrix");
      }
      const std::size_t i_end = std::min(n_ - 1, k + kl_);
      const std::size_t j_end = std::min(n_ - 1, k + ku_);
      for (std::size_t i = k + 1; i <= i_end; ++i) {
        const double f = at(i, k) / pivot;
        if (f == 0.0) continue;
        for (std::size_t j = k; j <= j_end; ++j) at(i, j) -= f * at(k, j);
        rhs[i] = rhs[i] - f * rhs[k];
      }
    }
    for (std::size_t k = n_; k-- > 0;) {
      Point2 acc = rhs[k];
      const std::size_t j_end = std::min(n_ - 1, k + ku_);
      for (std::size_t j = k + 1; j <= j_end; ++j) acc = acc - at(k, j) * rhs[j];
      rhs[k] = (1.0 / at(k, k)) * acc;
    }
  }

 private:
  std::size_t n_, kl_, ku_, w_;
  std::vector<double> data_;
};

}  // namespace

std::size_t SurfaceSpline::find_span(double t) const {
  const std::size_t n = control_.size() - 1;
  const auto p = static_cast<std::size_t>(degree_);
  if (t >= knots_[n + 1]) return n;
  if (t <= knots_[p]) return p;
  auto it = std::upper_bound(knots_.begin() + static_cast<std::ptrdiff_t>(p),
                             knots_.begin() + static_cast<std::ptrdiff_t>(n + 1), t);
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

SurfaceSpline::Jet SurfaceSpline::jet(double t) const {
  if (!(t >= t_min() && t <= t_max())) {
    throw Error(ErrorCode::out_of_range,
                "spline_eval: parameter " + std::to_string(t) + " outside knot range");
  }
  const std::size_t span = find_span(t);
  std::array<std::array<double, kMaxDegree + 1>, 3> ders{};
  basis_derivatives(knots_, span, t, degree_, std::min(2, degree_), ders);
  Jet out;
  for (int j = 0; j <= degree_; ++j) {
    const Point2 c = control_[span - static_cast<std::size_t>(degree_) + static_cast<std::size_t>(j)];
    out.p = out.p + ders[0][j] * c;
    out.d1 = out.d1 + ders[1][j] * c;
    out.d2 = out.d2 + ders[2][j] * c;
  }
  return out;
}

Point2 SurfaceSpline::eval(double t, int order) const {
  if (order < 0 || order > 2) {
    throw Error(ErrorCode::invalid_argument, "spline_eval: order must be 0, 1 or 2");
  }
  const Jet j = jet(t);
  return order == 0 ? j.p : (order == 1 ? j.d1 : j.d2);
}

SurfaceSpline spline_fit(std::span<const Point2> points, Parameterization parameterization,
                         int degree) {
  if (degree < 2 || degree > kMaxDegree) {
    throw Error(ErrorCode::invalid_argument, "spline_fit: degree must be in [2, 7]");
  }
  if (points.size() < static_cast<std::size_t>(degree) + 1) {
    throw Error(ErrorCode::invalid_argument,
                "spline_fit: need at least degree+1 points, got " + std::to_string(points.size()));
  }
  for (const auto& q : points) {
    if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
      throw Error(ErrorCode::invalid_argument, "spline_fit: non-finite coordinate");
    }
  }

  SurfaceSpline s;
  s.degree_ = degree;
  s.sites_ = site_parameters(points, parameterization);

  const std::size_t n = points.size() - 1;
  const auto p = static_cast<std::size_t>(degree);
  s.knots_.assign(n + p + 2, 0.0);
  for (std::size_t j = n + 1; j < s.knots_.size(); ++j) s.knots_[j] = 1.0;
  for (std::size_t j = 1; j + p <= n; ++j) {
    double acc = 0.0;
    for (std::size_t i = j; i < j + p; ++i) acc += s.sites_[i];
    s.knots_[j + p] = acc / static_cast<double>(p);
  }

  s.control_.assign(points.begin(), points.end());  // placeholder for find_span sizing
  std::vector<std::size_t> spans(n + 1);
  std::size_t kl = 0, ku = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    spans[k] = s.find_span(s.sites_[k]);
    kl = std::max(kl, k > spans[k] - p ? k - (spans[k] - p) : std::size_t{0});
    ku = std::max(ku, spans[k] > k ? spans[k] - k : std::size_t{0});
  }

  BandMatrix a(n + 1, kl, ku);
  for (std::size_t k = 0; k <= n; ++k) {
    std::array<std::array<double, kMaxDegree + 1>, 3> ders{};
    basis_derivatives(s.knots_, spans[k], s.sites_[k], degree, 0, ders);
    for (std::size_t j = 0; j <= p; ++j) {
      const double v = ders[0][j];
      if (v != 0.0) a.at(k, spans[k] - p + j) = v;
    }
  }
  std::vector<Point2> rhs(points.begin(), points.end());
  a.solve(rhs);
  s.control_ = std::move(rhs);
  return s;
}

double curvature_at(const SurfaceSpline& spline, double t) {
  const auto j = spline.jet(t);
  const double speed2 = j.d1.x * j.d1.x + j.d1.y * j.d1.y;
  if (std::sqrt(speed2) < 1e-12) {
    throw Error(ErrorCode::degenerate_geometry, "curvature_at: stationary point");
  }
  return std::abs(j.d1.x * j.d2.y - j.d1.y * j.d2.x) / std::pow(speed2, 1.5);
}

double slope_dydx(const SurfaceSpline& spline, double t) {
  const auto d = spline.eval(t, 1);
  if (std::abs(d.x) < 1e-14) {
    throw Error(ErrorCode::degenerate_geometry, "slope_dydx: vertical tangent");
  }
  return d.y / d.x;
}

double second_derivative_d2ydx2(const SurfaceSpline& spline, double t) {
  const auto j = spline.jet(t);
  if (std::abs(j.d1.x) < 1e-14) {
    throw Error(ErrorCode::degenerate_geometry, "second_derivative_d2ydx2: vertical tangent");
  }
  return (j.d1.x * j.d2.y - j.d1.y * j.d2.x) / (j.d1.x * j.d1.x * j.d1.x);
}

namespace {
constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                   0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665,
                                                     0.5688888888888889, 0.4786286704993665,
                                                     0.2369268850561891};
}  // namespace

double arc_length(const SurfaceSpline& spline, double a, double b) {
  if (b <= a) return 0.0;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < kNodes.size(); ++i) {
    acc += kWeights[i] * norm(spline.eval(mid + half * kNodes[i], 1));
  }
  return acc * half;
}

std::vector<double> cumulative_arc_length(const SurfaceSpline& spline, std::span<const double> ts) {
  auto segment = [&](double a, double b) { return arc_length(spline, a, b); };

  // Distinct interior breakpoints, so each quadrature piece is polynomial.
  std::vector<double> breaks;
  for (double k : spline.knots()) {
    if (breaks.empty() || k > breaks.back()) breaks.push_back(k);
  }

  std::vector<double> out;
  out.reserve(ts.size());
  double acc = 0.0, pos = spline.t_min();
  std::size_t bi = 1;
  for (double t : ts) {
    if (t < pos) throw Error(ErrorCode::invalid_argument, "cumulative_arc_length: ts must be sorted");
    while (bi < breaks.size() && breaks[bi] <= t) {
      acc += segment(pos, breaks[bi]);
      pos = breaks[bi];
      ++bi;
    }
    acc += segment(pos, t);
    pos = t;
    out.push_back(acc);
  }
  return out;
}

// Parameter of minimum x near site `i`, by bisection on x'(t).
double min_x_parameter(const SurfaceSpline& s, std::size_t i) {
  const auto& sites = s.sites();
  double t = sites[i];
  auto dx = [&](double u) { return s.eval(u, 1).x; };
  for (int side : {-1, 1}) {
    if ((side < 0 && i == 0) || (side > 0 && i + 1 == sites.size())) continue;
    double a = side < 0 ? sites[i - 1] : sites[i];
    double b = side < 0 ? sites[i] : sites[i + 1];
    double fa = dx(a), fb = dx(b);
    if (fa < 0.0 && fb > 0.0) {
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        (dx(m) < 0.0 ? a : b) = m;
      }
      const double cand = 0.5 * (a + b);
      if (s.eval(cand).x < s.eval(t).x) t = cand;
    }
  }
  return t;
}

}  // namespace afbench
