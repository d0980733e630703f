#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "afbench/cst.hpp"
#include "afbench/error.hpp"
#include "afbench/generators.hpp"
#include "oracles.hpp"

using namespace afbench;

namespace {

CstParams sample_params(std::uint64_t seed, std::size_t degree = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.08, 0.25), l(-0.2, -0.02);
  CstParams p;
  for (std::size_t i = 0; i <= degree; ++i) {
    p.upper_coeffs.push_back(u(rng));
    p.lower_coeffs.push_back(l(rng));
  }
  p.zeta_te_upper = 0.001;
  p.zeta_te_lower = -0.001;
  return p;
}

}  // namespace

TEST(Cst, ClassFunction) {
  EXPECT_EQ(cst_class(0.0), 0.0);
  EXPECT_EQ(cst_class(1.0), 0.0);
  EXPECT_DOUBLE_EQ(cst_class(0.25), 0.375);
  EXPECT_NEAR(cst_class(0.5), std::sqrt(0.5) * 0.5, 1e-9);
  EXPECT_NEAR(cst_class(0.5), 0.35355339, 1e-8);
  EXPECT_THROW(cst_class(-1e-9), Error);
  EXPECT_THROW(cst_class(1.0 + 1e-9), Error);
}

TEST(Cst, Bernstein) {
  for (double u : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    double sum = 0.0;
    for (int i = 0; i <= 8; ++i) sum += bernstein(8, i, u);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_EQ(bernstein(5, 0, 0.0), 1.0);
  EXPECT_EQ(bernstein(5, 5, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(bernstein(4, 2, 0.5), 0.375);
  EXPECT_THROW(bernstein(4, 5, 0.5), Error);
  EXPECT_THROW(bernstein(4, -1, 0.5), Error);
}

TEST(Cst, EvalFlatPlateAndTrailingEdgeTerm) {
  CstParams p;
  p.upper_coeffs.assign(9, 0.0);
  p.lower_coeffs.assign(9, 0.0);
  const auto grid = cosine_grid(64);
  auto s = cst_eval(p, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(s.upper[i], 0.0);
    EXPECT_EQ(s.lower[i], 0.0);
  }
  p.zeta_te_upper = 0.01;
  s = cst_eval(p, grid);
  EXPECT_EQ(s.upper.front(), 0.0);
  EXPECT_DOUBLE_EQ(s.upper.back(), 0.01);
}

TEST(Cst, EqualCoefficientsCollapseToClassFunction) {
  CstParams p;
  p.upper_coeffs.assign(9, 0.17);
  p.lower_coeffs.assign(9, -0.11);
  p.zeta_te_upper = 0.002;
  const auto grid = cosine_grid(40);
  const auto s = cst_eval(p, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(s.upper[i], 0.17 * cst_class(grid[i]) + grid[i] * 0.002, 1e-14);
    EXPECT_NEAR(s.lower[i], -0.11 * cst_class(grid[i]), 1e-14);
  }
}

TEST(Cst, LeadingEdgeClosure) {
  const auto p = sample_params(11);
  const std::vector<double> zero{0.0};
  const auto s = cst_eval(p, zero);
  EXPECT_EQ(s.upper[0], 0.0);
  EXPECT_EQ(s.lower[0], 0.0);
}

TEST(Cst, AirfoilIsCanonical) {
  const Airfoil a = cst_airfoil(sample_params(5));
  EXPECT_TRUE(validate(a).empty());
  EXPECT_EQ(a.provenance, Provenance::cst_gen);
}

TEST(Cst, FitRecoversKnownCoefficients) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto truth = sample_params(seed);
    const auto fit = cst_fit(cst_airfoil(truth), 8);
    for (std::size_t i = 0; i <= 8; ++i) {
      EXPECT_NEAR(fit.params.upper_coeffs[i], truth.upper_coeffs[i], 1e-8);
      EXPECT_NEAR(fit.params.lower_coeffs[i], truth.lower_coeffs[i], 1e-8);
    }
    EXPECT_DOUBLE_EQ(fit.params.zeta_te_upper, truth.zeta_te_upper);
    EXPECT_LT(fit.max_residual, 1e-10);
  }
}

TEST(Cst, FitsNaca2412) {
  const Airfoil a = naca4("2412");
  const auto fit = cst_fit(a, 8);
  EXPECT_LT(fit.max_residual, 1e-3);
  // Compare the refit contour against the closed form directly.
  const auto reference = oracle::naca4_dense(0.02, 0.4, 0.12, 20000);
  const Airfoil refit = cst_airfoil(fit.params);
  double worst = 0.0;
  for (const auto& p : refit.points) worst = std::max(worst, oracle::distance_to_polyline(p, reference));
  EXPECT_LT(worst, 1e-3);
}

TEST(Cst, FlatPlateFitsToZero) {
  CstParams zero;
  zero.upper_coeffs.assign(9, 0.0);
  zero.lower_coeffs.assign(9, 0.0);
  Airfoil plate = cst_airfoil(zero);
  const auto fit = cst_fit(plate, 8);
  for (std::size_t i = 0; i <= 8; ++i) {
    EXPECT_NEAR(fit.params.upper_coeffs[i], 0.0, 1e-10);
    EXPECT_NEAR(fit.params.lower_coeffs[i], 0.0, 1e-10);
  }
}

TEST(Cst, ResidualNonincreasingInDegree) {
  for (const char* name : {"2412", "4415", "0009"}) {
    const Airfoil a = naca4(name);
    double prev = 1e9;
    for (std::size_t d : {4u, 6u, 8u, 10u}) {
      const double r = cst_fit(a, d).max_residual;
      EXPECT_LE(r, prev + 1e-15) << name << " degree " << d;
      prev = r;
    }
  }
}

TEST(Cst, RoundTripWithinReportedResidual) {
  const Airfoil a = naca5("23012");
  const auto fit = cst_fit(a, 8);
  const Airfoil back = cst_airfoil(fit.params);
  // Same cosine psi grid, so the comparison is pointwise in y.
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(back.points[i].y - a.points[i].y));
  EXPECT_LE(worst, fit.max_residual + 1e-12);
}

TEST(Cst, FlipEquivariance) {
  const Airfoil a = naca4("2412");
  const auto f = cst_fit(a, 8).params;
  const auto g = cst_fit(flip_y(a), 8).params;
  for (std::size_t i = 0; i <= 8; ++i) {
    EXPECT_NEAR(g.upper_coeffs[i], -f.lower_coeffs[i], 1e-9);
    EXPECT_NEAR(g.lower_coeffs[i], -f.upper_coeffs[i], 1e-9);
  }
  EXPECT_NEAR(g.zeta_te_upper, -f.zeta_te_lower, 1e-12);
  EXPECT_NEAR(g.zeta_te_lower, -f.zeta_te_upper, 1e-12);
}

TEST(Cst, FitRejections) {
  const Airfoil a = naca4("0012", 65);
  EXPECT_THROW(cst_fit(a, 2), Error);
  try {
    cst_fit(a, 40);
    FAIL() << "expected rank deficiency";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rank_deficient);
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
}

TEST(Cst, ParamsChecked) {
  CstParams p;
  p.upper_coeffs.assign(9, 0.1);
  p.lower_coeffs.assign(8, -0.1);
  EXPECT_THROW(check_params(p), Error);
  p.lower_coeffs.assign(9, std::nan(""));
  EXPECT_THROW(check_params(p), Error);
}
