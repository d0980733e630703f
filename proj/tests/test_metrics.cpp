#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <iterator>
#include <numeric>
#include <sstream>

#include "afbench/error.hpp"
#include "afbench/generators.hpp"
#include "afbench/metrics.hpp"

using namespace afbench;

namespace {

std::vector<Airfoil> population(std::size_t n, std::uint64_t seed = 11) {
  return cst_perturb_generate(cst_fit(naca4("2412")).params, n, 0.2, seed);
}

Airfoil transformed(const Airfoil& a, double angle, double scale, Point2 shift) {
  Airfoil out = a;
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : out.points) p = Point2{scale * (c * p.x - s * p.y), scale * (s * p.x + c * p.y)} + shift;
  return out;
}

std::vector<bool> converged(int yes, int total) {
  std::vector<bool> v(static_cast<std::size_t>(total), false);
  for (int i = 0; i < yes; ++i) v[static_cast<std::size_t>(i)] = true;
  return v;
}

}  // namespace

TEST(Smoothness, CollinearIsZero) {
  std::vector<Point2> line;
  for (int i = 0; i < 257; ++i) line.push_back({i / 256.0, 0.3 * i / 256.0 - 0.1});
  EXPECT_NEAR(smoothness(line), 0.0, 1e-12);
}

TEST(Smoothness, SingleBump) {
  for (double h : {0.1, 0.037, -0.25}) {
    const std::vector<Point2> pts{{0, 0}, {0.5, h}, {1, 0}};
    EXPECT_DOUBLE_EQ(smoothness(pts), std::abs(h));
  }
}

TEST(Smoothness, RigidAndScaling) {
  for (const char* d : {"0012", "2412", "6409"}) {
    const Airfoil a = naca4(d);
    const double m = smoothness(a);
    EXPECT_NEAR(smoothness(transformed(a, 0.7, 1.0, {3.0, -2.0})), m, 1e-9);
    EXPECT_NEAR(smoothness(transformed(a, -1.3, 1.0, {0.0, 0.0})), m, 1e-9);
    for (double s : {0.25, 3.0, 10.0}) EXPECT_NEAR(smoothness(transformed(a, 0.0, s, {0, 0})), s * m, 1e-9);
  }
}

TEST(Smoothness, CoincidentNeighboursRejected) {
  const std::vector<Point2> pts{{0, 0}, {0.5, 0.2}, {0, 0}};
  EXPECT_THROW(smoothness(pts), Error);
}

TEST(Diversity, TwoByTwoClosedForm) {
  const auto pop = population(5);
  const Eigen::MatrixXd d = pairwise_distances(pop);
  const std::vector<std::size_t> s{1, 3};
  for (double h : {0.01, 0.05, 0.3}) {
    for (double eps : {1e-9, 1e-6}) {
      const double k = std::exp(-d(1, 3) * d(1, 3) / (2 * h * h));
      const double det = (1 + eps) * (1 + eps) - k * k;
      EXPECT_NEAR(similarity_log_det(d, s, h, eps), std::log(det), 1e-9 * std::max(1.0, std::abs(std::log(det))));
    }
  }
}

TEST(Diversity, DistancesAreFlattenedEuclidean) {
  const auto pop = population(4);
  const Eigen::MatrixXd d = pairwise_distances(pop);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < pop[a].size(); ++k) {
        const Point2 e = pop[a].points[k] - pop[b].points[k];
        s += e.x * e.x + e.y * e.y;
      }
      EXPECT_NEAR(d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), std::sqrt(s), 1e-12);
    }
  }
}

TEST(Diversity, MedianBandwidth) {
  Eigen::MatrixXd d(4, 4);
  d << 0, 1, 2, 3, 1, 0, 4, 5, 2, 4, 0, 6, 3, 5, 6, 0;
  EXPECT_DOUBLE_EQ(median_pairwise_distance(d), 3.5);
  Eigen::MatrixXd e(3, 3);
  e << 0, 1, 7, 1, 0, 2, 7, 2, 0;
  EXPECT_DOUBLE_EQ(median_pairwise_distance(e), 2.0);
}

TEST(Diversity, IdenticalSubsetIsLowest) {
  auto pop = population(20);
  const Airfoil copy = pop[0];
  for (int i = 0; i < 4; ++i) pop.push_back(copy);
  DiversityConfig cfg;
  cfg.subset_size = 4;
  const std::vector<std::vector<std::size_t>> same{{0, 20, 21, 22}};
  const double low = diversity_over_subsets(pop, same, cfg);
  const auto draws = draw_subsets(pop.size(), {4, 200, BandwidthMode::median_pairwise, 0.0, 1e-9, 5});
  for (const auto& s : draws) {
    std::set<std::size_t> distinct;
    for (auto i : s) distinct.insert(i >= 20 ? 0 : i);
    if (distinct.size() > 1) {
      const std::vector<std::vector<std::size_t>> one{s};
      EXPECT_LT(low, diversity_over_subsets(pop, one, cfg));
    }
  }
  EXPECT_LT(low, std::log(4.0) + 3 * std::log(1e-9) + 1e-3);
}

TEST(Diversity, DuplicateNeverIncreasesLogDet) {
  auto pop = population(30);
  DiversityConfig cfg;
  cfg.bandwidth_mode = BandwidthMode::fixed;
  cfg.bandwidth = median_pairwise_distance(pairwise_distances(pop));
  const auto draws = draw_subsets(30, {8, 50, BandwidthMode::median_pairwise, 0.0, 1e-9, 9});
  for (const auto& s : draws) {
    auto grown = pop;
    grown.push_back(pop[s[0]]);
    std::vector<std::size_t> with = s;
    with.back() = 30;
    const double base = diversity_over_subsets(pop, std::vector<std::vector<std::size_t>>{s}, cfg);
    const double dup = diversity_over_subsets(grown, std::vector<std::vector<std::size_t>>{with}, cfg);
    EXPECT_LE(dup, base + 1e-9);
  }
}

TEST(Diversity, PermutationWithMatchingIndices) {
  const auto pop = population(25);
  std::vector<std::size_t> perm(25);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Airfoil> shuffled(25);
  std::vector<std::size_t> where(25);
  for (std::size_t i = 0; i < 25; ++i) {
    shuffled[i] = pop[perm[i]];
    where[perm[i]] = i;
  }
  DiversityConfig cfg;
  cfg.subset_size = 6;
  cfg.n_draws = 40;
  auto subsets = draw_subsets(25, cfg);
  auto mapped = subsets;
  for (auto& s : mapped) {
    for (auto& i : s) i = where[i];
  }
  EXPECT_NEAR(diversity_over_subsets(pop, subsets, cfg), diversity_over_subsets(shuffled, mapped, cfg), 1e-9);
}

TEST(Diversity, SubsetDraws) {
  DiversityConfig cfg;
  cfg.seed = 4;
  const auto a = draw_subsets(100, cfg), b = draw_subsets(100, cfg);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 100u);
  for (const auto& s : a) {
    EXPECT_EQ(s.size(), 16u);
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 16u);
    for (auto i : s) EXPECT_LT(i, 100u);
  }
  cfg.seed = 5;
  EXPECT_NE(draw_subsets(100, cfg), a);
}

TEST(Diversity, ConcentratesOverManyDraws) {
  const auto pop = population(60);
  DiversityConfig a;
  a.n_draws = 10000;
  a.seed = 1;
  DiversityConfig b = a;
  b.seed = 2;
  const double da = diversity(pop, a), db = diversity(pop, b);
  EXPECT_EQ(da, diversity(pop, a));
  EXPECT_NEAR(da, db, 0.01 * std::abs(da));
}

TEST(Diversity, Rejections) {
  auto pop = population(10);
  EXPECT_THROW(diversity(pop, {16, 10}), Error);
  EXPECT_THROW(diversity(pop, {1, 10}), Error);
  DiversityConfig bad;
  bad.subset_size = 4;
  bad.jitter = 0.0;
  EXPECT_THROW(diversity(pop, bad), Error);
  bad.jitter = 1e-3;
  EXPECT_THROW(diversity(pop, bad), Error);
  pop[3].points[7].y = std::nan("");
  EXPECT_THROW(diversity(pop, {4, 10}), Error);
  auto uneven = population(10);
  uneven[2] = naca4("0012", 129);
  EXPECT_THROW(diversity(uneven, {4, 10}), Error);
}

TEST(SuccessRate, ThresholdIsStrict) {
  EXPECT_EQ(success_rate(std::vector<std::vector<bool>>{converged(66, 66), converged(66, 66)}), 1.0);
  EXPECT_EQ(success_rate(std::vector<std::vector<bool>>{converged(39, 66)}), 0.0);
  EXPECT_EQ(success_rate(std::vector<std::vector<bool>>{converged(40, 66)}), 1.0);
  EXPECT_EQ(success_rate(std::vector<std::vector<bool>>{converged(3, 5)}), 0.0);
  const std::vector<std::vector<bool>> mixed{converged(40, 66), converged(39, 66), converged(66, 66)};
  EXPECT_DOUBLE_EQ(success_rate(mixed), 2.0 / 3.0);
}

TEST(SuccessRate, PermutationInvariantAndMonotone) {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution coin(0.6);
  std::vector<std::vector<bool>> c(40, std::vector<bool>(66));
  for (auto& row : c) {
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = coin(rng);
  }
  const double r = success_rate(c);
  auto shuffled = c;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(success_rate(shuffled), r);
  double prev = r;
  for (int k = 0; k < 500; ++k) {
    const std::size_t i = rng() % 40, j = rng() % 66;
    if (!c[i][j]) {
      c[i][j] = true;
      const double now = success_rate(c);
      EXPECT_GE(now, prev);
      prev = now;
    }
  }
}

TEST(SuccessRate, Rejections) {
  EXPECT_THROW(success_rate(std::vector<std::vector<bool>>{}), Error);
  EXPECT_THROW(success_rate(std::vector<std::vector<bool>>{converged(1, 3), converged(1, 4)}), Error);
}

TEST(Report, ColumnsAndScaling) {
  SigmaReport s;
  for (std::size_t i = 0; i < kParsecCount; ++i) s.sigma[i] = 0.001 * static_cast<double>(i + 1);
  s.sigma_bar = 0.006;
  std::vector<MetricsReportRow> rows{{"ours", s, -31.5, 0.0123, 0.75}, {"baseline", std::nullopt, std::nullopt, 0.02, std::nullopt}};
  std::ostringstream os;
  write_metrics_report(os, rows);
  std::istringstream in(os.str());
  std::string header, note, line1, line2;
  std::getline(in, header);
  std::getline(in, note);
  std::getline(in, line1);
  std::getline(in, line2);
  std::istringstream h(header);
  std::vector<std::string> cols{std::istream_iterator<std::string>(h), {}};
  ASSERT_EQ(cols.size(), 16u);
  EXPECT_EQ(cols[1], "s1");
  EXPECT_EQ(cols[12], "s_bar");
  EXPECT_EQ(cols[13], "D");
  EXPECT_EQ(cols[14], "M");
  EXPECT_EQ(cols[15], "R");
  std::istringstream r1(line1);
  std::vector<std::string> v{std::istream_iterator<std::string>(r1), {}};
  ASSERT_EQ(v.size(), 16u);
  EXPECT_EQ(v[0], "ours");
  EXPECT_EQ(v[1], "0.1");
  EXPECT_EQ(v[11], "1.1");
  EXPECT_EQ(v[12], "0.6");
  EXPECT_EQ(v[13], "-31.5");
  EXPECT_EQ(v[14], "1.23");
  EXPECT_EQ(v[15], "0.75");
  std::istringstream r2(line2);
  std::vector<std::string> w{std::istream_iterator<std::string>(r2), {}};
  ASSERT_EQ(w.size(), 16u);
  EXPECT_EQ(w[1], "-");
  EXPECT_EQ(w[14], "2");
  EXPECT_EQ(w[15], "-");
}
