#include "afbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>

#include "afbench/error.hpp"
#include "afbench/random.hpp"

namespace afbench {

double smoothness(std::span<const Point2> pts) {
  if (pts.size() < 3) throw Error(ErrorCode::invalid_argument, "smoothness: need at least 3 points");
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Point2 chord = pts[i + 1] - pts[i - 1];
    const double len = norm(chord);
    if (!(len > 0.0)) {
      throw Error(ErrorCode::degenerate_geometry,
                  "smoothness: coincident neighbours around point " + std::to_string(i));
    }
    const Point2 rel = pts[i] - pts[i - 1];
    total += std::abs(chord.x * rel.y - chord.y * rel.x) / len;
  }
  return total;
}

Eigen::MatrixXd pairwise_distances(std::span<const Airfoil> population) {
  const auto m = static_cast<Eigen::Index>(population.size());
  if (m == 0) return {};
  const std::size_t n = population.front().size();
  Eigen::MatrixXd flat(2 * static_cast<Eigen::Index>(n), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& pts = population[static_cast<std::size_t>(j)].points;
    if (pts.size() != n) {
      throw Error(ErrorCode::invalid_argument, "diversity: airfoils must have equal point counts");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(pts[k].x) || !std::isfinite(pts[k].y)) {
        throw Error(ErrorCode::invalid_argument, "diversity: non-finite coordinate");
      }
      flat(2 * static_cast<Eigen::Index>(k), j) = pts[k].x;
      flat(2 * static_cast<Eigen::Index>(k) + 1, j) = pts[k].y;
    }
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      d(a, b) = d(b, a) = (flat.col(a) - flat.col(b)).norm();
    }
  }
  return d;
}

double median_pairwise_distance(const Eigen::MatrixXd& distances) {
  std::vector<double> v;
  for (Eigen::Index a = 0; a < distances.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < distances.cols(); ++b) v.push_back(distances(a, b));
  }
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double similarity_log_det(const Eigen::MatrixXd& distances, std::span<const std::size_t> subset,
                          double bandwidth, double jitter) {
  const auto k = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd l(k, k);
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      const double d = distances(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]),
                                 static_cast<Eigen::Index>(subset[static_cast<std::size_t>(b)]));
      l(a, b) = std::exp(-d * d * inv);
    }
    l(a, a) += jitter;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(l);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "diversity: similarity matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

std::vector<std::vector<std::size_t>> draw_subsets(std::size_t population, const DiversityConfig& cfg) {
  if (cfg.subset_size < 2) throw Error(ErrorCode::invalid_argument, "diversity: subset size must be >= 2");
  if (cfg.n_draws < 1) throw Error(ErrorCode::invalid_argument, "diversity: need at least one draw");
  if (population <= cfg.subset_size) {
    throw Error(ErrorCode::invalid_argument, "diversity: population too small for subset size " +
                                                 std::to_string(cfg.subset_size));
  }
  std::vector<std::vector<std::size_t>> out(cfg.n_draws);
  std::vector<std::size_t> idx(population);
  for (std::size_t draw = 0; draw < cfg.n_draws; ++draw) {
    Rng rng(derive_seed(cfg.seed, 0x444956 /* "DIV" */, draw));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < cfg.subset_size; ++i) {
      std::swap(idx[i], idx[i + rng.below(population - i)]);
    }
    out[draw].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cfg.subset_size));
  }
  return out;
}

double resolve_bandwidth(const Eigen::MatrixXd& distances, const DiversityConfig& cfg) {
  if (!(cfg.jitter > 0.0 && cfg.jitter <= 1e-6)) {
    throw Error(ErrorCode::invalid_argument, "diversity: jitter must be in (0, 1e-6]");
  }
  const double h = cfg.bandwidth_mode == BandwidthMode::fixed ? cfg.bandwidth
                                                              : median_pairwise_distance(distances);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::invalid_argument, "diversity: bandwidth must be positive (identical population?)");
  }
  return h;
}

double diversity_over_subsets(std::span<const Airfoil> population,
                              std::span<const std::vector<std::size_t>> subsets,
                              const DiversityConfig& cfg) {
  if (subsets.empty()) throw Error(ErrorCode::invalid_argument, "diversity: no subsets");
  const Eigen::MatrixXd d = pairwise_distances(population);
  const double h = resolve_bandwidth(d, cfg);
  double acc = 0.0;
  for (const auto& s : subsets) {
    for (auto i : s) {
      if (i >= population.size()) throw Error(ErrorCode::out_of_range, "diversity: subset index out of range");
    }
    acc += similarity_log_det(d, s, h, cfg.jitter);
  }
  return acc / static_cast<double>(subsets.size());
}

double diversity(std::span<const Airfoil> population, const DiversityConfig& cfg) {
  const auto subsets = draw_subsets(population.size(), cfg);
  return diversity_over_subsets(population, subsets, cfg);
}

double success_rate(std::span<const std::vector<bool>> convergence, double threshold) {
  if (convergence.empty()) throw Error(ErrorCode::invalid_argument, "success_rate: empty population");
  const std::size_t m = convergence.front().size();
  if (m == 0) throw Error(ErrorCode::invalid_argument, "success_rate: no work conditions");
  std::size_t ok = 0;
  for (const auto& c : convergence) {
    if (c.size() != m) {
      throw Error(ErrorCode::invalid_argument, "success_rate: convergence vectors differ in length");
    }
    const auto converged = static_cast<double>(std::count(c.begin(), c.end(), true));
    if (converged / static_cast<double>(m) > threshold) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(convergence.size());
}

void write_metrics_report(std::ostream& os, std::span<const MetricsReportRow> rows) {
  constexpr int kWidth = 10;
  std::size_t label_width = 8;
  for (const auto& r : rows) label_width = std::max(label_width, r.label.size() + 2);

  os << std::left << std::setw(static_cast<int>(label_width)) << "source" << std::right;
  for (int i = 1; i <= 11; ++i) os << std::setw(kWidth) << ("s" + std::to_string(i));
  os << std::setw(kWidth) << "s_bar" << std::setw(kWidth) << "D" << std::setw(kWidth) << "M"
     << std::setw(kWidth) << "R" << '\n';
  os << "# label errors (s1..s11, s_bar) and smoothness M in units of 0.01\n";

  auto cell = [&](std::optional<double> v, double scale) {
    if (!v) {
      os << std::setw(kWidth) << "-";
    } else {
      std::ostringstream s;
      s << std::setprecision(4) << (*v / scale);
      os << std::setw(kWidth) << s.str();
    }
  };
  for (const auto& r : rows) {
    os << std::left << std::setw(static_cast<int>(label_width)) << r.label << std::right;
    for (std::size_t i = 0; i < kParsecCount; ++i) {
      cell(r.sigma ? std::optional<double>(r.sigma->sigma[i]) : std::nullopt, 0.01);
    }
    cell(r.sigma ? std::optional<double>(r.sigma->sigma_bar) : std::nullopt, 0.01);
    cell(r.diversity, 1.0);
    cell(r.smoothness, 0.01);
    cell(r.success_rate, 1.0);
    os << '\n';
  }
}

}  // namespace afbench
