#include "afbench/cst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "afbench/error.hpp"

namespace afbench {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return std::round(r);
}

double bernstein(int n, int i, double u) {
  if (i < 0 || i > n) {
    throw Error(ErrorCode::invalid_argument, "bernstein: index outside [0, n]");
  }
  return binomial(n, i) * std::pow(u, i) * std::pow(1.0 - u, n - i);
}

double cst_class(double psi, double n1, double n2) {
  if (!(psi >= 0.0 && psi <= 1.0)) {
    throw Error(ErrorCode::out_of_range, "cst_class: psi outside [0, 1]");
  }
  return std::pow(psi, n1) * std::pow(1.0 - psi, n2);
}

void check_params(const CstParams& params) {
  if (params.upper_coeffs.size() != params.lower_coeffs.size() || params.upper_coeffs.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "CstParams: upper and lower coefficient vectors must be non-empty and equal length");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(params.upper_coeffs.begin(), params.upper_coeffs.end(), finite) ||
      !std::all_of(params.lower_coeffs.begin(), params.lower_coeffs.end(), finite) ||
      !std::isfinite(params.zeta_te_upper) || !std::isfinite(params.zeta_te_lower) ||
      !std::isfinite(params.n1) || !std::isfinite(params.n2)) {
    throw Error(ErrorCode::invalid_argument, "CstParams: non-finite value");
  }
}

double cst_surface(std::span<const double> coeffs, double zeta_te, double psi, double n1, double n2) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  double shape = 0.0;
  for (int i = 0; i <= d; ++i) shape += coeffs[static_cast<std::size_t>(i)] * bernstein(d, i, psi);
  return cst_class(psi, n1, n2) * shape + psi * zeta_te;
}

CstSurfaces cst_eval(const CstParams& params, std::span<const double> psi_grid) {
  check_params(params);
  CstSurfaces out;
  out.upper.reserve(psi_grid.size());
  out.lower.reserve(psi_grid.size());
  for (double psi : psi_grid) {
    out.upper.push_back(cst_surface(params.upper_coeffs, params.zeta_te_upper, psi, params.n1, params.n2));
    out.lower.push_back(cst_surface(params.lower_coeffs, params.zeta_te_lower, psi, params.n1, params.n2));
  }
  return out;
}

std::vector<double> cosine_grid(std::size_t half) {
  std::vector<double> psi(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    psi[k] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(half)));
  }
  psi.front() = 0.0;
  psi.back() = 1.0;
  return psi;
}

Airfoil cst_airfoil(const CstParams& params, std::size_t n) {
  if (n < 5 || n % 2 == 0) throw Error(ErrorCode::invalid_argument, "cst_airfoil: n must be odd");
  const std::size_t half = (n - 1) / 2;
  const auto psi = cosine_grid(half);
  const auto z = cst_eval(params, psi);
  Airfoil a;
  a.points.reserve(n);
  for (std::size_t k = half + 1; k-- > 0;) a.points.push_back({psi[k], z.upper[k]});
  for (std::size_t k = 1; k <= half; ++k) a.points.push_back({psi[k], z.lower[k]});
  a.provenance = Provenance::cst_gen;
  return a;
}

namespace {

struct SurfaceFit {
  std::vector<double> coeffs;
  double condition = 0.0;
};

SurfaceFit fit_surface(std::span<const Point2> pts, double zeta_te, std::size_t degree, double n1,
                       double n2, const char* label) {
  std::vector<const Point2*> rows;
  for (const auto& p : pts) {
    if (p.x >= 1e-6 && p.x < 1.0 - 1e-12) rows.push_back(&p);
  }
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  if (static_cast<Eigen::Index>(rows.size()) < cols) {
    throw Error(ErrorCode::rank_deficient, std::string("cst_fit: ") + label + " surface has " +
                                               std::to_string(rows.size()) + " usable points for " +
                                               std::to_string(cols) + " coefficients (condition estimate inf)");
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double psi = rows[static_cast<std::size_t>(r)]->x;
    const double c = cst_class(psi, n1, n2);
    for (Eigen::Index i = 0; i < cols; ++i) {
      a(r, i) = c * bernstein(static_cast<int>(degree), static_cast<int>(i), psi);
    }
    b(r) = rows[static_cast<std::size_t>(r)]->y - psi * zeta_te;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-13);
  const auto diag = qr.matrixR().diagonal().cwiseAbs();
  const double cond = diag.minCoeff() > 0.0 ? diag.maxCoeff() / diag.minCoeff()
                                            : std::numeric_limits<double>::infinity();
  if (qr.rank() < cols) {
    std::ostringstream msg;
    msg << "cst_fit: " << label << " design matrix rank " << qr.rank() << " < " << cols
        << " (condition estimate " << cond << ")";
    throw Error(ErrorCode::rank_deficient, msg.str());
  }
  const Eigen::VectorXd sol = qr.solve(b);
  return {std::vector<double>(sol.data(), sol.data() + sol.size()), cond};
}

}  // namespace

CstFit cst_fit(const Airfoil& airfoil, std::size_t degree) {
  if (degree < 3) throw Error(ErrorCode::invalid_argument, "cst_fit: degree must be >= 3");
  const auto& pts = airfoil.points;
  if (pts.size() < 5) throw Error(ErrorCode::invalid_argument, "cst_fit: too few points");
  const std::size_t le = leading_edge_index(pts);
  if (le == 0 || le + 1 == pts.size()) {
    throw Error(ErrorCode::degenerate_geometry, "cst_fit: leading edge is not interior");
  }
  const std::span<const Point2> upper(pts.data(), le + 1);
  const std::span<const Point2> lower(pts.data() + le, pts.size() - le);

  CstFit fit;
  auto& prm = fit.params;
  const auto te_offset = [](const Point2& p) { return p.x > 0.0 ? p.y / p.x : 0.0; };
  prm.zeta_te_upper = te_offset(pts.front());
  prm.zeta_te_lower = te_offset(pts.back());

  auto up = fit_surface(upper, prm.zeta_te_upper, degree, prm.n1, prm.n2, "upper");
  auto lo = fit_surface(lower, prm.zeta_te_lower, degree, prm.n1, prm.n2, "lower");
  prm.upper_coeffs = std::move(up.coeffs);
  prm.lower_coeffs = std::move(lo.coeffs);
  fit.condition_estimate = std::max(up.condition, lo.condition);

  double sum2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool on_upper = i <= le;
    const double psi = std::clamp(pts[i].x, 0.0, 1.0);
    const double z = on_upper ? cst_surface(prm.upper_coeffs, prm.zeta_te_upper, psi, prm.n1, prm.n2)
                              : cst_surface(prm.lower_coeffs, prm.zeta_te_lower, psi, prm.n1, prm.n2);
    const double r = std::abs(z - pts[i].y);
    fit.max_residual = std::max(fit.max_residual, r);
    sum2 += r * r;
  }
  fit.rms_residual = std::sqrt(sum2 / static_cast<double>(pts.size()));
  return fit;
}

}  // namespace afbench
