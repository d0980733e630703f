#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "afbench/geometry.hpp"

namespace afbench {

inline constexpr double kReynolds = 1e5;
inline constexpr std::size_t kConditionCount = 66;

struct WorkCondition {
  double re = kReynolds;
  double ma = 0.0;
  double cl = 0.0;

  friend bool operator==(const WorkCondition&, const WorkCondition&) = default;
};

struct PolarPoint {
  double aoa = 0.0;
  double cd = 0.0;
  double cm = 0.0;
};

/// Solver outcome at one condition. `result` is present iff converged.
struct PolarRecord {
  WorkCondition condition;
  std::optional<PolarPoint> result;

  bool converged() const { return result.has_value(); }
};

/// Ma 0.2..0.7 (outer) x CL 0.0..2.0 (inner), Re = 1e5: 66 conditions.
std::vector<WorkCondition> condition_grid();

/// SHA-256 (hex) over the little-endian IEEE-754 bytes of x0, y0, x1, y1, ...
std::string airfoil_hash(const Airfoil& airfoil);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Shortest decimal that round-trips to the same double.
std::string format_shortest(double v);
double parse_double(std::string_view s);

class AeroSolver {
 public:
  virtual ~AeroSolver() = default;
  /// nullopt means the solver did not converge (including timeouts).
  virtual std::optional<PolarPoint> solve(const Airfoil& airfoil, const WorkCondition& condition) = 0;
  virtual std::string name() const = 0;
};

struct XfoilOptions {
  std::filesystem::path executable;
  std::chrono::milliseconds timeout{10'000};
  int max_iterations = 100;
  int panels = 160;
};

/// Drives an XFoil-compatible executable over stdin: loads a Selig .dat,
/// runs a fixed-CL viscous point and reads the accumulated polar file.
class XfoilSolver final : public AeroSolver {
 public:
  explicit XfoilSolver(XfoilOptions options);
  std::optional<PolarPoint> solve(const Airfoil& airfoil, const WorkCondition& condition) override;
  std::string name() const override { return "xfoil:" + options_.executable.string(); }

  /// The command script sent on stdin for one condition.
  static std::string command_script(const std::string& dat_file, const std::string& polar_file,
                                    const WorkCondition& condition, const XfoilOptions& options);

 private:
  XfoilOptions options_;
};

/// Last data row of an XFoil polar file, or nullopt when it holds none.
std::optional<PolarPoint> parse_xfoil_polar(const std::string& text);

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
};

/// Runs `executable` with `stdin_data`, discarding its output. Kills the child
/// after `timeout`.
ProcessResult run_process(const std::filesystem::path& executable, const std::string& stdin_data,
                          const std::filesystem::path& working_dir, std::chrono::milliseconds timeout);

/// Append-only polar store keyed by (airfoil hash, Re, Ma, CL). Concurrent
/// readers, serialized writers. One tab-separated line per record:
/// hash, re, ma, cl, converged, aoa, cd, cm (nan when not converged).
class PolarCache {
 public:
  PolarCache() = default;
  /// Loads existing records from `file` (if present) and appends new ones to it.
  explicit PolarCache(std::filesystem::path file);
  PolarCache(PolarCache&& other) noexcept;

  std::optional<PolarRecord> find(const std::string& hash, const WorkCondition& c) const;
  void insert(const std::string& hash, const PolarRecord& record);
  std::size_t size() const;

  static std::string format_line(const std::string& hash, const PolarRecord& record);
  static std::pair<std::string, PolarRecord> parse_line(std::string_view line);

  /// Full snapshot in key order.
  void save(const std::filesystem::path& file) const;
  static PolarCache load(const std::filesystem::path& file);

 private:
  static std::string key(const std::string& hash, const WorkCondition& c);

  std::optional<std::filesystem::path> file_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::pair<std::string, PolarRecord>> records_;
};

/// One record per condition, cached. Throws Error(aero_unavailable) when a
/// record is missing from the cache and there is no solver.
std::vector<PolarRecord> evaluate_airfoil(const Airfoil& airfoil, std::span<const WorkCondition> conditions,
                                          AeroSolver* solver, PolarCache& cache);

/// Batch evaluation on a bounded worker pool over (airfoil, condition) pairs.
std::vector<std::vector<PolarRecord>> evaluate_batch(std::span<const Airfoil> airfoils,
                                                     std::span<const WorkCondition> conditions,
                                                     AeroSolver* solver, PolarCache& cache,
                                                     unsigned pool_size);

struct FilterResult {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> discarded;
};

/// Discards an airfoil iff none of the 66 grid conditions converged.
FilterResult filter_airfoils(std::size_t batch_size, std::span<const std::vector<PolarRecord>> polars);

std::vector<bool> convergence_vector(std::span<const PolarRecord> records);

struct AeroConfig {
  std::optional<std::filesystem::path> solver;  // empty means no solver
  std::chrono::milliseconds timeout{10'000};
  unsigned pool_size = 0;  // 0 = hardware concurrency
};

/// JSON file {"solver": path|"none", "timeout_s": x, "pool_size": n}, then
/// AFBENCH_SOLVER, AFBENCH_SOLVER_TIMEOUT, AFBENCH_POOL_SIZE overrides.
AeroConfig load_aero_config(const std::optional<std::filesystem::path>& file);

std::unique_ptr<AeroSolver> make_solver(const AeroConfig& config);

}  // namespace afbench
