#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "afbench/error.hpp"
#include "afbench/spline.hpp"

using namespace afbench;

namespace {

std::vector<Point2> circle(std::size_t n, double r, Point2 c) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  pts.pop_back();  // keep the curve open
  return pts;
}

std::vector<Point2> parabola(int half) {
  std::vector<Point2> pts;
  for (int i = -half; i <= half; ++i) {
    const double x = static_cast<double>(i) / half;
    pts.push_back({x, x * x});
  }
  return pts;
}

}  // namespace

TEST(Spline, InterpolatesSites) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(0.0, 0.05);
  std::vector<Point2> pts;
  double x = 0.0;
  for (int i = 0; i < 40; ++i) {
    x += 0.01 + jitter(rng);
    pts.push_back({x, std::sin(7.0 * x) + jitter(rng)});
  }
  for (auto param : {Parameterization::chord_length, Parameterization::centripetal, Parameterization::uniform}) {
    const auto s = spline_fit(pts, param);
    ASSERT_EQ(s.sites().size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto p = s.eval(s.sites()[i]);
      EXPECT_NEAR(p.x, pts[i].x, 1e-10);
      EXPECT_NEAR(p.y, pts[i].y, 1e-10);
    }
  }
}

TEST(Spline, CollinearPointsGiveStraightLine) {
  std::vector<Point2> pts{{0, 0}, {0.1, 0.05}, {0.35, 0.175}, {0.6, 0.3}, {1.0, 0.5}};
  const auto s = spline_fit(pts);
  for (int k = 0; k <= 50; ++k) {
    const double t = s.t_min() + (s.t_max() - s.t_min()) * k / 50.0;
    EXPECT_LT(curvature_at(s, t), 1e-9);
    const auto p = s.eval(t);
    EXPECT_NEAR(p.y, 0.5 * p.x, 1e-12);
    const auto d2 = s.eval(t, 2);
    EXPECT_NEAR(d2.y, 0.5 * d2.x, 1e-9);
  }
}

TEST(Spline, ParabolaDerivatives) {
  std::vector<Point2> pts;
  for (int i = 0; i <= 8; ++i) pts.push_back({i / 8.0, (i / 8.0) * (i / 8.0)});
  const auto s = spline_fit(pts, Parameterization::uniform);
  // x(t) = t exactly for uniformly spaced x, so t = x.
  EXPECT_NEAR(second_derivative_d2ydx2(s, 0.5), 2.0, 1e-6);
  EXPECT_NEAR(slope_dydx(s, 0.25), 0.5, 1e-6);
  const auto d1 = s.eval(0.25, 1);
  EXPECT_NEAR(d1.y / d1.x, 0.5, 1e-6);
}

TEST(Spline, ParabolaVertexCurvature) {
  const auto pts = parabola(8);
  const auto s = spline_fit(pts, Parameterization::uniform);
  const double t0 = s.sites()[8];
  EXPECT_NEAR(s.eval(t0).x, 0.0, 1e-15);
  EXPECT_NEAR(curvature_at(s, t0), 2.0, 1e-5);
}

TEST(Spline, QuadraticThroughThreePoints) {
  std::vector<Point2> pts{{0, 0}, {0.5, 0.25}, {1, 1}};
  const auto s = spline_fit(pts, Parameterization::uniform, 2);
  EXPECT_EQ(s.degree(), 2);
  for (double t : {0.1, 0.3, 0.77}) {
    const auto p = s.eval(t);
    EXPECT_NEAR(p.x, t, 1e-14);
    EXPECT_NEAR(p.y, t * t, 1e-14);
  }
}

TEST(Spline, EvalAtSiteReturnsInput) {
  const auto pts = parabola(5);
  const auto s = spline_fit(pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(distance(s.eval(s.sites()[i]), pts[i]), 0.0, 1e-12);
  }
}

TEST(Spline, RejectsOutOfRangeParameter) {
  const auto s = spline_fit(parabola(4));
  EXPECT_THROW(s.eval(s.t_min() - 1e-9), Error);
  EXPECT_THROW(s.eval(s.t_max() + 1e-9), Error);
  EXPECT_THROW(s.eval(0.5, 3), Error);
  EXPECT_NO_THROW(s.eval(s.t_max()));
}

TEST(Spline, RejectsRepeatedSites) {
  std::vector<Point2> pts{{0, 0}, {0.5, 0.1}, {0.5, 0.1}, {1, 0}, {1.5, 0.2}};
  try {
    spline_fit(pts);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_geometry);
  }
}

TEST(Spline, RejectsTooFewPointsAndBadDegree) {
  std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 0}};
  EXPECT_THROW(spline_fit(pts, Parameterization::centripetal, 3), Error);
  EXPECT_THROW(spline_fit(pts, Parameterization::centripetal, 1), Error);
}

TEST(Spline, CircleCurvature) {
  const auto pts = circle(1025, 0.5, {0.5, 0.0});
  const auto s = spline_fit(pts, Parameterization::chord_length);
  for (int k = 0; k <= 400; ++k) {
    const double t = s.t_min() + (s.t_max() - s.t_min()) * k / 400.0;
    EXPECT_NEAR(curvature_at(s, t), 2.0, 1e-4) << "t=" << t;
  }
}

TEST(Spline, StraightLineCurvatureIsZero) {
  std::vector<Point2> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({0.3 * i, -0.2 * i + 1.0});
  const auto s = spline_fit(pts);
  for (int k = 0; k <= 20; ++k) {
    EXPECT_NEAR(curvature_at(s, s.t_min() + (s.t_max() - s.t_min()) * k / 20.0), 0.0, 1e-10);
  }
}

TEST(Spline, StationaryPointRejected) {
  // x(t) is the quadratic through 0, 1, 0: its derivative vanishes at the middle site.
  std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 0}};
  const auto s = spline_fit(pts, Parameterization::uniform, 2);
  EXPECT_THROW(curvature_at(s, s.sites()[1]), Error);
}

TEST(Spline, CurvatureRigidInvariantAndScales) {
  std::vector<Point2> pts;
  for (int i = 0; i < 30; ++i) {
    const double t = i / 29.0;
    pts.push_back({t, 0.1 * std::sin(3.0 * t) + 0.05 * t * t});
  }
  const double ang = 0.7, s = 3.5;
  const Point2 shift{2.0, -1.25};
  std::vector<Point2> moved, scaled;
  for (const auto& p : pts) {
    moved.push_back({std::cos(ang) * p.x - std::sin(ang) * p.y + shift.x, std::sin(ang) * p.x + std::cos(ang) * p.y + shift.y});
    scaled.push_back(p * s);
  }
  const auto a = spline_fit(pts), b = spline_fit(moved), c = spline_fit(scaled);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double ka = curvature_at(a, a.sites()[i]);
    EXPECT_NEAR(curvature_at(b, b.sites()[i]), ka, 1e-9);
    EXPECT_NEAR(curvature_at(c, c.sites()[i]), ka / s, 1e-9);
  }
}

TEST(Spline, ArcLengthOfLine) {
  std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const auto s = spline_fit(pts, Parameterization::chord_length);
  EXPECT_NEAR(arc_length(s, s.t_min(), s.t_max()), 4.0 * std::sqrt(2.0), 1e-12);
}

TEST(Spline, ConcurrentEvaluationIsSafe) {
  const auto s = spline_fit(circle(129, 0.5, {0.5, 0}));
  std::vector<double> serial(64), parallel(64);
  for (int i = 0; i < 64; ++i) serial[i] = curvature_at(s, s.t_max() * i / 64.0);
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      for (int i = w; i < 64; i += 4) parallel[i] = curvature_at(s, s.t_max() * i / 64.0);
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(serial, parallel);
}
