#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "afbench/annotation.hpp"
#include "afbench/geometry.hpp"

namespace afbench {

/// Sum over interior points of the perpendicular distance to the line through
/// the two neighbours. Lower is smoother.
double smoothness(std::span<const Point2> polyline);
inline double smoothness(const Airfoil& a) { return smoothness(a.points); }

enum class BandwidthMode { median_pairwise, fixed };

struct DiversityConfig {
  std::size_t subset_size = 16;
  std::size_t n_draws = 100;
  BandwidthMode bandwidth_mode = BandwidthMode::median_pairwise;
  double bandwidth = 0.0;  // used when bandwidth_mode == fixed
  double jitter = 1e-9;
  std::uint64_t seed = 0;
};

/// Euclidean distances between flattened coordinate vectors.
Eigen::MatrixXd pairwise_distances(std::span<const Airfoil> population);

double median_pairwise_distance(const Eigen::MatrixXd& distances);

/// log det(L + jitter I) with L_jk = exp(-d_jk^2 / (2 h^2)) over `subset`.
double similarity_log_det(const Eigen::MatrixXd& distances, std::span<const std::size_t> subset,
                          double bandwidth, double jitter);

/// Subsets drawn without replacement, one counter-seeded stream per draw.
std::vector<std::vector<std::size_t>> draw_subsets(std::size_t population, const DiversityConfig& cfg);

double resolve_bandwidth(const Eigen::MatrixXd& distances, const DiversityConfig& cfg);

/// Mean log-determinant of the similarity matrices over sampled subsets.
double diversity(std::span<const Airfoil> population, const DiversityConfig& cfg = {});

/// Same as diversity() but over caller-supplied subsets.
double diversity_over_subsets(std::span<const Airfoil> population,
                              std::span<const std::vector<std::size_t>> subsets,
                              const DiversityConfig& cfg = {});

inline constexpr double kSuccessThreshold = 0.60;

/// Fraction of airfoils whose converged fraction is strictly above threshold.
double success_rate(std::span<const std::vector<bool>> convergence, double threshold = kSuccessThreshold);

struct MetricsReportRow {
  std::string label;
  std::optional<SigmaReport> sigma;
  std::optional<double> diversity;
  std::optional<double> smoothness;
  std::optional<double> success_rate;
};

/// Tabular text mirroring the benchmark table: sigma_1..11, sigma_bar, D, M, R.
/// Label errors and smoothness are shown in units of 0.01; absent values as "-".
void write_metrics_report(std::ostream& os, std::span<const MetricsReportRow> rows);

}  // namespace afbench
