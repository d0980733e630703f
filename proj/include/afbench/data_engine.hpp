#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "afbench/aero.hpp"
#include "afbench/annotation.hpp"
#include "afbench/geometry.hpp"

namespace afbench {

inline constexpr std::string_view kManifestFormat = "afbench-manifest/1";
inline constexpr std::string_view kManifestFile = "manifest.jsonl";
inline constexpr std::string_view kPolarCacheFile = "polar_cache.tsv";

enum class Split { train, val, test };
std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

enum class AeroStatus { annotated, unavailable };

struct SampleEntry {
  std::string id;
  std::string file;  // relative to the dataset directory
  Provenance provenance = Provenance::manual;
  std::string parent;  // seed id for cst_gen samples, source path for ingested files
  ParsecParams parsec;
  std::vector<Point2> keypoints;
  AeroStatus aero = AeroStatus::unavailable;
  Split split = Split::train;
};

struct SkippedSource {
  std::string source;
  std::string reason;
};

struct DatasetManifest {
  nlohmann::ordered_json config;  // snapshot: generator settings, seeds, versions
  std::string created;            // timestamp; the only non-deterministic field
  std::vector<SampleEntry> samples;
  std::vector<SkippedSource> skipped;
  std::vector<std::string> discarded;  // ids removed by the convergence filter
};

/// One JSON record per line, stable key order: a header, then samples,
/// skipped sources and discarded ids.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& file);
DatasetManifest read_manifest(const std::filesystem::path& file);

struct SplitRatios {
  std::array<double, 3> values{0.8, 0.1, 0.1};
};

/// Seeded permutation then contiguous assignment with largest-remainder
/// rounding, per provenance group when `stratified`.
void split_dataset(DatasetManifest& manifest, const SplitRatios& ratios, std::uint64_t seed,
                   bool stratified = true);

/// Largest-remainder split of `n` items into three classes.
std::array<std::size_t, 3> split_counts(std::size_t n, const SplitRatios& ratios);

struct BuildOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;  // path or "none"
  unsigned workers = 0;
};

/// Runs sources -> canonicalize -> annotate -> (evaluate + filter) -> split and
/// writes samples/<id>.dat plus the manifest into `out_dir`. `config_dir`
/// anchors relative paths in the config.
DatasetManifest build_dataset(const nlohmann::json& config, const std::filesystem::path& config_dir,
                              const std::filesystem::path& out_dir, const BuildOverrides& overrides = {});

DatasetManifest build_dataset(const std::filesystem::path& config_file, const std::filesystem::path& out_dir,
                              const BuildOverrides& overrides = {});

/// Evaluates every sample of a built dataset with the solver, drops all-fail
/// airfoils and marks the rest annotated. Rewrites the manifest.
DatasetManifest filter_dataset(const std::filesystem::path& dataset_dir, AeroSolver* solver, unsigned workers = 0);

/// Referential-integrity and annotation checks; empty means valid.
std::vector<std::string> validate_dataset(const std::filesystem::path& dataset_dir);

/// Loads the canonical airfoil of a manifest sample.
Airfoil load_sample(const std::filesystem::path& dataset_dir, const SampleEntry& sample);

/// Named airfoil source: "naca:2412", "naca:23012" or a .dat path.
Airfoil resolve_airfoil_source(const std::string& spec, const std::filesystem::path& base_dir);

nlohmann::ordered_json to_json(const ParsecParams& p);
ParsecParams parsec_from_json(const nlohmann::json& j);
nlohmann::ordered_json points_to_json(std::span<const Point2> pts);
std::vector<Point2> points_from_json(const nlohmann::json& j);

}  // namespace afbench
