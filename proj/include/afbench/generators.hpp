#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "afbench/cst.hpp"
#include "afbench/geometry.hpp"

namespace afbench {

// NACA closed forms --------------------------------------------------------

double naca_thickness(double x, double t, bool closed_te = false);

struct CamberPoint {
  double yc;
  double slope;
};

CamberPoint naca4_camber(double x, double m, double p);

/// How the thickness distribution is laid onto the camber line. `vertical`
/// keeps the nose on the chord origin and both trailing-edge points at x = 1,
/// which the CST class function can represent; `perpendicular` is the
/// textbook construction.
enum class ThicknessMode { vertical, perpendicular };

/// Cosine-spaced in x, Selig order, chord-normalized.
Airfoil naca4(double m, double p, double t, std::size_t n = kCanonicalPointCount,
              bool closed_te = false, ThicknessMode mode = ThicknessMode::vertical);

/// "2412" style designation; zero camber gets a nominal p of 0.4.
Airfoil naca4(std::string_view designation, std::size_t n = kCanonicalPointCount,
              bool closed_te = false, ThicknessMode mode = ThicknessMode::vertical);

struct Naca5Family {
  double r;   // end of the cubic camber segment
  double k1;  // published constant for design CL = 0.3
};

/// Non-reflex 5-digit camber family for position digit 1..5.
Naca5Family naca5_family(int position_digit);

CamberPoint naca5_camber(double x, int cl_digit, int position_digit);

Airfoil naca5(int cl_digit, int position_digit, double t, std::size_t n = kCanonicalPointCount,
              ThicknessMode mode = ThicknessMode::vertical);

/// "23012" style designation. Reflex families (third digit 1) are rejected.
Airfoil naca5(std::string_view designation, std::size_t n = kCanonicalPointCount,
              ThicknessMode mode = ThicknessMode::vertical);

// Rational Bezier layer -----------------------------------------------------

struct BezierControl {
  std::vector<Point2> control_points;
  std::vector<double> weights;
  std::vector<double> params;
};

std::vector<Point2> bezier_layer(const BezierControl& ctrl);

// Latin hypercube -------------------------------------------------------------

struct LhsPlan {
  std::vector<std::pair<double, double>> ranges;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// n_samples x n_dims. Each column visits every one of the n_samples equal
/// strata exactly once; column j uses its own seeded stream.
Eigen::MatrixXd lhs_sample(const LhsPlan& plan);

// CST perturbation ------------------------------------------------------------

inline constexpr double kDefaultPerturbBand = 0.1;
inline constexpr double kPerturbFloor = 0.01;

/// LHS draws over the Bernstein coefficients of both surfaces within
/// p +- band * max(|p|, 0.01). Trailing-edge offsets are kept.
std::vector<CstParams> cst_perturb_params(const CstParams& base, std::size_t n, double band,
                                          std::uint64_t seed);

std::vector<Airfoil> cst_perturb_generate(const CstParams& base, std::size_t n, double band,
                                          std::uint64_t seed,
                                          std::size_t point_count = kCanonicalPointCount);

}  // namespace afbench
