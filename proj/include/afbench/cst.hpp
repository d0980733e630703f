#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "afbench/geometry.hpp"

namespace afbench {

/// Class-shape transformation parameters for both surfaces. zeta_te_* are the
/// trailing-edge offsets in chord units.
struct CstParams {
  std::vector<double> upper_coeffs;
  std::vector<double> lower_coeffs;
  double zeta_te_upper = 0.0;
  double zeta_te_lower = 0.0;
  double n1 = 0.5;
  double n2 = 1.0;

  std::size_t degree() const { return upper_coeffs.empty() ? 0 : upper_coeffs.size() - 1; }
};

inline constexpr std::size_t kDefaultCstDegree = 8;

double binomial(int n, int k);
double bernstein(int n, int i, double u);
double cst_class(double psi, double n1 = 0.5, double n2 = 1.0);

struct CstSurfaces {
  std::vector<double> upper;
  std::vector<double> lower;
};

/// Throws if the parameter vectors are inconsistent.
void check_params(const CstParams& params);

double cst_surface(std::span<const double> coeffs, double zeta_te, double psi, double n1, double n2);
CstSurfaces cst_eval(const CstParams& params, std::span<const double> psi_grid);

/// Cosine grid on [0, 1] with `half + 1` points.
std::vector<double> cosine_grid(std::size_t half);

/// Canonical Selig-ordered airfoil from CST parameters on a cosine psi grid.
Airfoil cst_airfoil(const CstParams& params, std::size_t n = kCanonicalPointCount);

struct CstFit {
  CstParams params;
  double max_residual = 0.0;
  double rms_residual = 0.0;
  /// Ratio of largest to smallest |R_ii| of the pivoted QR, worst of the two surfaces.
  double condition_estimate = 0.0;
};

/// Per-surface linear least squares (pivoted QR) in the Bernstein coefficients
/// with the trailing-edge offsets read from the endpoint y values.
CstFit cst_fit(const Airfoil& airfoil, std::size_t degree = kDefaultCstDegree);

}  // namespace afbench
