#include "afbench/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "afbench/error.hpp"
#include "afbench/random.hpp"

namespace afbench {

double naca_thickness(double x, double t, bool closed_te) {
  const double a4 = closed_te ? -0.1036 : -0.1015;
  return 5.0 * t * (0.2969 * std::sqrt(x) - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x + a4 * x * x * x * x);
}

CamberPoint naca4_camber(double x, double m, double p) {
  if (m == 0.0) return {0.0, 0.0};
  if (x < p) {
    return {m / (p * p) * (2.0 * p * x - x * x), 2.0 * m / (p * p) * (p - x)};
  }
  const double q = (1.0 - p) * (1.0 - p);
  return {m / q * ((1.0 - 2.0 * p) + 2.0 * p * x - x * x), 2.0 * m / q * (p - x)};
}

namespace {

template <typename Camber>
Airfoil naca_contour(Camber&& camber, double t, std::size_t n, bool closed_te, ThicknessMode mode) {
  if (n < 65 || n % 2 == 0) throw Error(ErrorCode::invalid_argument, "naca: n must be odd and >= 65");
  const std::size_t half = (n - 1) / 2;
  const auto xs = cosine_grid(half);
  std::vector<Point2> upper(half + 1), lower(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    const double x = xs[k];
    const double yt = naca_thickness(x, t, closed_te);
    const CamberPoint c = camber(x);
    const double theta = mode == ThicknessMode::perpendicular ? std::atan(c.slope) : 0.0;
    upper[k] = {x - yt * std::sin(theta), c.yc + yt * std::cos(theta)};
    lower[k] = {x + yt * std::sin(theta), c.yc - yt * std::cos(theta)};
  }
  std::vector<Point2> pts;
  pts.reserve(n);
  for (std::size_t k = half + 1; k-- > 0;) pts.push_back(upper[k]);
  for (std::size_t k = 1; k <= half; ++k) pts.push_back(lower[k]);
  Airfoil a;
  a.points = normalize_chord(pts);
  a.provenance = Provenance::naca;
  return a;
}

std::string two_digits(double t) {
  const int v = static_cast<int>(std::lround(t * 100.0));
  return (v < 10 ? "0" : "") + std::to_string(v);
}

}  // namespace

Airfoil naca4(double m, double p, double t, std::size_t n, bool closed_te, ThicknessMode mode) {
  if (!(m >= 0.0 && m <= 0.095)) throw Error(ErrorCode::out_of_range, "naca4: camber m outside [0, 0.095]");
  if (!(p >= 0.05 && p <= 0.95)) throw Error(ErrorCode::out_of_range, "naca4: camber position p outside [0.05, 0.95]");
  if (!(t > 0.0 && t <= 0.3)) throw Error(ErrorCode::out_of_range, "naca4: thickness t outside (0, 0.3]");
  Airfoil a = naca_contour([&](double x) { return naca4_camber(x, m, p); }, t, n, closed_te, mode);
  a.name = "NACA " + std::to_string(static_cast<int>(std::lround(m * 100))) +
           std::to_string(m == 0.0 ? 0 : static_cast<int>(std::lround(p * 10))) + two_digits(t);
  return a;
}

Airfoil naca4(std::string_view designation, std::size_t n, bool closed_te, ThicknessMode mode) {
  if (designation.size() != 4 || !std::all_of(designation.begin(), designation.end(),
                                              [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw Error(ErrorCode::invalid_argument, "naca4: designation must be 4 digits");
  }
  const double m = (designation[0] - '0') / 100.0;
  double p = (designation[1] - '0') / 10.0;
  const double t = std::stoi(std::string(designation.substr(2))) / 100.0;
  if (m == 0.0) p = 0.4;
  Airfoil a = naca4(m, p, t, n, closed_te, mode);
  a.name = "NACA " + std::string(designation);
  return a;
}

Naca5Family naca5_family(int position_digit) {
  switch (position_digit) {
    case 1: return {0.0580, 361.400};
    case 2: return {0.1260, 51.640};
    case 3: return {0.2025, 15.957};
    case 4: return {0.2900, 6.643};
    case 5: return {0.3910, 3.230};
    default:
      throw Error(ErrorCode::invalid_argument,
                  "naca5: unsupported camber position digit " + std::to_string(position_digit));
  }
}

CamberPoint naca5_camber(double x, int cl_digit, int position_digit) {
  if (cl_digit < 1 || cl_digit > 9) {
    throw Error(ErrorCode::invalid_argument, "naca5: design lift digit must be 1..9");
  }
  const auto [r, k1] = naca5_family(position_digit);
  // Published constants are for design CL 0.3 (first digit 2); scale linearly.
  const double scale = (0.15 * cl_digit) / 0.3;
  if (x < r) {
    return {scale * k1 / 6.0 * (x * x * x - 3.0 * r * x * x + r * r * (3.0 - r) * x),
            scale * k1 / 6.0 * (3.0 * x * x - 6.0 * r * x + r * r * (3.0 - r))};
  }
  return {scale * k1 * r * r * r / 6.0 * (1.0 - x), -scale * k1 * r * r * r / 6.0};
}

Airfoil naca5(int cl_digit, int position_digit, double t, std::size_t n, ThicknessMode mode) {
  naca5_family(position_digit);
  if (!(t > 0.0 && t <= 0.3)) throw Error(ErrorCode::out_of_range, "naca5: thickness outside (0, 0.3]");
  Airfoil a = naca_contour([&](double x) { return naca5_camber(x, cl_digit, position_digit); }, t, n, false, mode);
  a.name = "NACA " + std::to_string(cl_digit) + std::to_string(position_digit) + "0" + two_digits(t);
  return a;
}

Airfoil naca5(std::string_view designation, std::size_t n, ThicknessMode mode) {
  if (designation.size() != 5 || !std::all_of(designation.begin(), designation.end(),
                                              [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw Error(ErrorCode::invalid_argument, "naca5: designation must be 5 digits");
  }
  if (designation[2] != '0') {
    throw Error(ErrorCode::invalid_argument, "naca5: reflex camber families are not supported");
  }
  const int thickness = std::stoi(std::string(designation.substr(3)));
  if (thickness == 0) throw Error(ErrorCode::invalid_argument, "naca5: zero thickness");
  Airfoil a = naca5(designation[0] - '0', designation[1] - '0', thickness / 100.0, n, mode);
  a.name = "NACA " + std::string(designation);
  return a;
}

std::vector<Point2> bezier_layer(const BezierControl& ctrl) {
  const auto& p = ctrl.control_points;
  const auto& w = ctrl.weights;
  if (p.empty() || p.size() != w.size()) {
    throw Error(ErrorCode::invalid_argument, "bezier_layer: need as many weights as control points");
  }
  if (!std::all_of(w.begin(), w.end(), [](double v) { return v > 0.0 && std::isfinite(v); })) {
    throw Error(ErrorCode::invalid_argument, "bezier_layer: weights must be strictly positive");
  }
  if (!std::is_sorted(ctrl.params.begin(), ctrl.params.end()) ||
      std::any_of(ctrl.params.begin(), ctrl.params.end(), [](double u) { return !(u >= 0.0 && u <= 1.0); })) {
    throw Error(ErrorCode::invalid_argument, "bezier_layer: params must be sorted within [0, 1]");
  }
  const int n = static_cast<int>(p.size()) - 1;
  std::vector<Point2> out;
  out.reserve(ctrl.params.size());
  for (double u : ctrl.params) {
    Point2 num;
    double den = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double b = bernstein(n, i, u) * w[static_cast<std::size_t>(i)];
      num = num + b * p[static_cast<std::size_t>(i)];
      den += b;
    }
    out.push_back((1.0 / den) * num);
  }
  return out;
}

Eigen::MatrixXd lhs_sample(const LhsPlan& plan) {
  for (const auto& [lo, hi] : plan.ranges) {
    if (!(lo < hi)) throw Error(ErrorCode::invalid_argument, "lhs_sample: each range needs low < high");
  }
  const auto n = plan.n_samples;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(plan.ranges.size()));
  std::vector<std::size_t> strata(n);
  for (std::size_t j = 0; j < plan.ranges.size(); ++j) {
    Rng rng(derive_seed(plan.seed, 0x4c4853 /* "LHS" */, j));
    for (std::size_t k = 0; k < n; ++k) strata[k] = k;
    rng.shuffle(std::span<std::size_t>(strata));
    const auto [lo, hi] = plan.ranges[j];
    const double width = hi - lo;
    for (std::size_t row = 0; row < n; ++row) {
      const std::size_t k = strata[row];
      double v = lo + width * ((static_cast<double>(k) + rng.uniform()) / static_cast<double>(n));
      // Keep rounding from pushing a draw across a stratum boundary.
      auto bucket = [&](double x) {
        return static_cast<long long>(std::floor((x - lo) / width * static_cast<double>(n)));
      };
      while (bucket(v) > static_cast<long long>(k)) v = std::nextafter(v, lo);
      while (bucket(v) < static_cast<long long>(k)) v = std::nextafter(v, hi);
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return out;
}

std::vector<CstParams> cst_perturb_params(const CstParams& base, std::size_t n, double band,
                                          std::uint64_t seed) {
  check_params(base);
  if (!(band > 0.0)) throw Error(ErrorCode::invalid_argument, "cst_perturb: band must be > 0");
  const std::size_t m = base.upper_coeffs.size();
  LhsPlan plan;
  plan.n_samples = n;
  plan.seed = seed;
  auto add_range = [&](double p) {
    const double half = band * std::max(std::abs(p), kPerturbFloor);
    plan.ranges.emplace_back(p - half, p + half);
  };
  for (double p : base.upper_coeffs) add_range(p);
  for (double p : base.lower_coeffs) add_range(p);
  const Eigen::MatrixXd draws = lhs_sample(plan);

  std::vector<CstParams> out(n, base);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      out[r].upper_coeffs[i] = draws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
      out[r].lower_coeffs[i] = draws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m + i));
    }
  }
  return out;
}

std::vector<Airfoil> cst_perturb_generate(const CstParams& base, std::size_t n, double band,
                                          std::uint64_t seed, std::size_t point_count) {
  const auto params = cst_perturb_params(base, n, band, seed);
  std::vector<Airfoil> out;
  out.reserve(n);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Airfoil a = cst_airfoil(params[i], point_count);
    a.points = normalize_chord(a.points);
    a.provenance = Provenance::cst_gen;
    a.name = "cst_gen " + std::to_string(i);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace afbench
