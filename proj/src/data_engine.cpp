#include "afbench/data_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include "afbench/cst.hpp"
#include "afbench/dat_io.hpp"
#include "afbench/error.hpp"
#include "afbench/generators.hpp"
#include "afbench/parallel.hpp"
#include "afbench/random.hpp"
#include "afbench/version.hpp"

namespace afbench {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw Error(ErrorCode::parse_error, "unknown split '" + std::string(s) + "'");
}

ordered_json to_json(const ParsecParams& p) {
  ordered_json j;
  const auto v = p.to_array();
  for (std::size_t i = 0; i < kParsecCount; ++i) j[std::string(parsec_names()[i])] = v[i];
  return j;
}

ParsecParams parsec_from_json(const json& j) {
  std::array<double, kParsecCount> v{};
  for (std::size_t i = 0; i < kParsecCount; ++i) {
    const std::string name(parsec_names()[i]);
    if (!j.contains(name)) throw Error(ErrorCode::parse_error, "missing PARSEC field '" + name + "'");
    v[i] = j.at(name).get<double>();
  }
  return ParsecParams::from_array(v);
}

ordered_json points_to_json(std::span<const Point2> pts) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point2> points_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "points must be an array of [x, y] pairs");
  std::vector<Point2> pts;
  pts.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw Error(ErrorCode::parse_error, "points must be an array of [x, y] pairs");
    }
    pts.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return pts;
}

// Manifest I/O ------------------------------------------------------------------

void write_manifest(const DatasetManifest& m, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::not_found, "write_manifest: cannot open " + file.string());
  ordered_json header;
  header["kind"] = "header";
  header["format"] = kManifestFormat;
  header["created"] = m.created;
  header["config"] = m.config;
  std::array<std::size_t, 3> per_split{};
  for (const auto& s : m.samples) ++per_split[static_cast<std::size_t>(s.split)];
  header["counts"] = {{"samples", m.samples.size()},
                      {"train", per_split[0]},
                      {"val", per_split[1]},
                      {"test", per_split[2]},
                      {"skipped", m.skipped.size()},
                      {"discarded", m.discarded.size()}};
  os << header.dump() << '\n';
  for (const auto& s : m.samples) {
    ordered_json j;
    j["kind"] = "sample";
    j["id"] = s.id;
    j["file"] = s.file;
    j["provenance"] = to_string(s.provenance);
    j["parent"] = s.parent;
    j["parsec"] = to_json(s.parsec);
    j["keypoints"] = points_to_json(s.keypoints);
    j["aero"] = s.aero == AeroStatus::annotated ? "annotated" : "unavailable";
    j["split"] = to_string(s.split);
    os << j.dump() << '\n';
  }
  for (const auto& s : m.skipped) {
    ordered_json j;
    j["kind"] = "skipped";
    j["source"] = s.source;
    j["reason"] = s.reason;
    os << j.dump() << '\n';
  }
  for (const auto& id : m.discarded) {
    ordered_json j;
    j["kind"] = "discarded";
    j["id"] = id;
    os << j.dump() << '\n';
  }
}

DatasetManifest read_manifest(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error(ErrorCode::not_found, "read_manifest: cannot open " + file.string());
  DatasetManifest m;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++number;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        if (j.at("format").get<std::string>() != kManifestFormat) {
          throw Error(ErrorCode::parse_error, "unsupported manifest format");
        }
        m.created = j.value("created", "");
        m.config = j.at("config");
        have_header = true;
      } else if (kind == "sample") {
        SampleEntry s;
        s.id = j.at("id").get<std::string>();
        s.file = j.at("file").get<std::string>();
        s.provenance = provenance_from_string(j.at("provenance").get<std::string>());
        s.parent = j.value("parent", "");
        s.parsec = parsec_from_json(j.at("parsec"));
        s.keypoints = points_from_json(j.at("keypoints"));
        s.aero = j.at("aero").get<std::string>() == "annotated" ? AeroStatus::annotated : AeroStatus::unavailable;
        s.split = split_from_string(j.at("split").get<std::string>());
        m.samples.push_back(std::move(s));
      } else if (kind == "skipped") {
        m.skipped.push_back({j.at("source").get<std::string>(), j.at("reason").get<std::string>()});
      } else if (kind == "discarded") {
        m.discarded.push_back(j.at("id").get<std::string>());
      } else {
        throw Error(ErrorCode::parse_error, "unknown record kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, file.string() + ":" + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), file.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::parse_error, "read_manifest: missing header in " + file.string());
  return m;
}

// Splitting -------------------------------------------------------------------------

std::array<std::size_t, 3> split_counts(std::size_t n, const SplitRatios& ratios) {
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double quota = static_cast<double>(n) * ratios.values[k];
    counts[k] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    rem[k] = quota - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (rem[k] > rem[best] + 1e-12) best = k;
    }
    ++counts[best];
    rem[best] = -1.0;
    ++assigned;
  }
  return counts;
}

void split_dataset(DatasetManifest& m, const SplitRatios& ratios, std::uint64_t seed, bool stratified) {
  double sum = 0.0;
  for (double r : ratios.values) {
    if (!(r > 0.0)) throw Error(ErrorCode::invalid_argument, "split_dataset: ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::invalid_argument, "split_dataset: ratios must sum to 1");
  if (m.samples.size() < 3) {
    throw Error(ErrorCode::invalid_argument, "split_dataset: fewer samples than split classes");
  }

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < m.samples.size(); ++i) {
    const std::string key = stratified ? std::string(to_string(m.samples[i].provenance)) : std::string("all");
    groups[key].push_back(i);
  }
  for (auto& [name, members] : groups) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return m.samples[a].id < m.samples[b].id; });
    std::uint64_t stream = 1469598103934665603ULL;  // FNV-1a of the group name
    for (unsigned char c : name) stream = (stream ^ c) * 1099511628211ULL;
    Rng rng(derive_seed(seed, 0x53504c /* "SPL" */, stream));
    rng.shuffle(std::span<std::size_t>(members));
    const auto counts = split_counts(members.size(), ratios);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < counts[k]; ++c) m.samples[members[pos++]].split = static_cast<Split>(k);
    }
  }
}

// Sources ----------------------------------------------------------------------------

namespace {

struct Candidate {
  std::string id;
  Provenance provenance;
  std::string parent;
  std::optional<Airfoil> airfoil;
  std::string source;
};

std::vector<std::filesystem::path> dat_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::not_found, "not a directory: " + dir.string());
  }
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".dat") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::filesystem::path anchor(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::pair<double, double> range_of(const json& j, const char* key, std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& r = j.at(key);
  return {r.at(0).get<double>(), r.at(1).get<double>()};
}

std::string numbered(const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu", i);
  return prefix + buf;
}

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return s;
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ingest_dir(const std::filesystem::path& dir, Provenance provenance, const std::string& prefix,
                std::size_t point_count, std::vector<Candidate>& out, std::vector<SkippedSource>& skipped) {
  for (const auto& f : dat_files(dir)) {
    Candidate c{prefix + sanitize(f.stem().string()), provenance, f.filename().string(), std::nullopt, f.string()};
    try {
      Airfoil a = read_dat(f, point_count);
      a.provenance = provenance;
      c.airfoil = std::move(a);
      out.push_back(std::move(c));
    } catch (const Error& e) {
      skipped.push_back({f.string(), e.what()});
    }
  }
}

}  // namespace

Airfoil resolve_airfoil_source(const std::string& spec, const std::filesystem::path& base_dir) {
  if (spec.rfind("naca:", 0) == 0) {
    const std::string digits = spec.substr(5);
    if (digits.size() == 4) return naca4(digits);
    if (digits.size() == 5) return naca5(digits);
    throw Error(ErrorCode::invalid_argument, "unknown NACA designation '" + digits + "'");
  }
  return read_dat(anchor(base_dir, spec));
}

DatasetManifest build_dataset(const json& config, const std::filesystem::path& config_dir,
                              const std::filesystem::path& out_dir, const BuildOverrides& overrides) {
  const std::uint64_t seed = overrides.seed.value_or(config.value("seed", std::uint64_t{0}));
  const std::size_t point_count = config.value("point_count", kCanonicalPointCount);
  const std::size_t keypoint_count = config.value("keypoint_count", kDefaultKeypointCount);
  const std::size_t cst_degree = config.value("cst_degree", kDefaultCstDegree);
  const json sources = config.value("sources", json::object());
  const unsigned workers = overrides.workers == 0 ? default_workers() : overrides.workers;

  std::vector<Candidate> cands;
  std::vector<SkippedSource> skipped;

  if (sources.contains("uiuc_dir")) {
    ingest_dir(anchor(config_dir, sources["uiuc_dir"].get<std::string>()), Provenance::uiuc, "uiuc-",
               point_count, cands, skipped);
  }
  if (sources.contains("naca4")) {
    const auto& s = sources["naca4"];
    const auto count = s.value("count", std::size_t{0});
    LhsPlan plan{{range_of(s, "m", {0.0, 0.07}), range_of(s, "p", {0.3, 0.7}), range_of(s, "t", {0.05, 0.20})},
                 count, derive_seed(seed, 4)};
    const auto draws = lhs_sample(plan);
    for (std::size_t i = 0; i < count; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      Candidate c{numbered("naca4-", i), Provenance::naca, "", std::nullopt, "naca4"};
      try {
        c.airfoil = naca4(draws(r, 0), draws(r, 1), draws(r, 2), point_count);
        cands.push_back(std::move(c));
      } catch (const Error& e) {
        skipped.push_back({c.id, e.what()});
      }
    }
  }
  if (sources.contains("naca5")) {
    const auto& s = sources["naca5"];
    const auto count = s.value("count", std::size_t{0});
    const auto cl = range_of(s, "cl_digit", {1, 4});
    const auto pos = range_of(s, "position_digit", {1, 5});
    LhsPlan plan{{{0.0, 1.0}, {0.0, 1.0}, range_of(s, "t", {0.05, 0.20})}, count, derive_seed(seed, 5)};
    const auto draws = lhs_sample(plan);
    auto digit = [](double u, std::pair<double, double> r) {
      const int lo = static_cast<int>(r.first), hi = static_cast<int>(r.second);
      return std::min(hi, lo + static_cast<int>(std::floor(u * (hi - lo + 1))));
    };
    for (std::size_t i = 0; i < count; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      Candidate c{numbered("naca5-", i), Provenance::naca, "", std::nullopt, "naca5"};
      try {
        c.airfoil = naca5(digit(draws(r, 0), cl), digit(draws(r, 1), pos), draws(r, 2), point_count);
        cands.push_back(std::move(c));
      } catch (const Error& e) {
        skipped.push_back({c.id, e.what()});
      }
    }
  }
  if (sources.contains("cst_perturb")) {
    const auto& s = sources["cst_perturb"];
    const auto count = s.value("count", std::size_t{0});
    const double band = s.value("band", kDefaultPerturbBand);
    const auto seeds = s.value("seeds", std::vector<std::string>{});
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const std::string parent = sanitize(seeds[k].rfind("naca:", 0) == 0
                                              ? "naca" + seeds[k].substr(5)
                                              : std::filesystem::path(seeds[k]).stem().string());
      try {
        const Airfoil base = resolve_airfoil_source(seeds[k], config_dir);
        const CstFit fit = cst_fit(base, cst_degree);
        auto generated = cst_perturb_generate(fit.params, count, band, derive_seed(seed, 0xC57, k), point_count);
        for (std::size_t i = 0; i < generated.size(); ++i) {
          Candidate c{numbered("cst-" + parent + "-", i), Provenance::cst_gen, parent, std::move(generated[i]),
                      seeds[k]};
          cands.push_back(std::move(c));
        }
      } catch (const Error& e) {
        skipped.push_back({seeds[k], e.what()});
      }
    }
  }
  if (sources.contains("imports")) {
    for (const auto& imp : sources["imports"]) {
      const auto dir = anchor(config_dir, imp.at("dir").get<std::string>());
      const Provenance prov = provenance_from_string(imp.value("provenance", "manual"));
      try {
        ingest_dir(dir, prov, std::string(to_string(prov)) + "-", point_count, cands, skipped);
      } catch (const Error& e) {
        skipped.push_back({dir.string(), e.what()});
      }
    }
  }

  {
    std::set<std::string> ids;
    for (const auto& c : cands) {
      if (!ids.insert(c.id).second) throw Error(ErrorCode::invalid_argument, "build_dataset: duplicate id " + c.id);
    }
  }

  // Canonical checks and geometric annotation, in parallel; results by index.
  std::vector<std::optional<SampleEntry>> entries(cands.size());
  std::vector<std::string> failures(cands.size());
  parallel_for(cands.size(), workers, [&](std::size_t i) {
    const auto& c = cands[i];
    try {
      const auto issues = validate(*c.airfoil, point_count);
      if (!issues.empty()) throw Error(ErrorCode::degenerate_geometry, "invalid airfoil: " + issues.front());
      SampleEntry e;
      e.id = c.id;
      e.file = "samples/" + c.id + ".dat";
      e.provenance = c.provenance;
      e.parent = c.parent;
      e.parsec = annotate_parsec(*c.airfoil);
      e.keypoints = extract_keypoints(*c.airfoil, keypoint_count);
      entries[i] = std::move(e);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  DatasetManifest m;
  std::vector<Airfoil> airfoils;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (entries[i]) {
      m.samples.push_back(std::move(*entries[i]));
      airfoils.push_back(*cands[i].airfoil);
      if (airfoils.back().name.empty() || cands[i].provenance == Provenance::cst_gen) airfoils.back().name = cands[i].id;
    } else {
      skipped.push_back({cands[i].id, failures[i]});
    }
  }
  m.skipped = std::move(skipped);

  std::filesystem::create_directories(out_dir / "samples");

  AeroConfig aero = load_aero_config(std::nullopt);
  if (config.contains("solver")) {
    const auto s = config["solver"].get<std::string>();
    aero.solver = s == "none" ? std::nullopt : std::optional<std::filesystem::path>(anchor(config_dir, s));
  }
  if (overrides.solver) {
    aero.solver = *overrides.solver == "none" ? std::nullopt : std::optional<std::filesystem::path>(*overrides.solver);
  }
  if (aero.solver && !m.samples.empty()) {
    auto solver = make_solver(aero);
    PolarCache cache(out_dir / kPolarCacheFile);
    const auto grid = condition_grid();
    const auto polars = evaluate_batch(airfoils, grid, solver.get(), cache,
                                       aero.pool_size == 0 ? workers : aero.pool_size);
    const auto fr = filter_airfoils(airfoils.size(), polars);
    std::vector<SampleEntry> kept;
    std::vector<Airfoil> kept_airfoils;
    for (auto i : fr.kept) {
      m.samples[i].aero = AeroStatus::annotated;
      kept.push_back(std::move(m.samples[i]));
      kept_airfoils.push_back(std::move(airfoils[i]));
    }
    for (auto i : fr.discarded) m.discarded.push_back(m.samples[i].id);
    m.samples = std::move(kept);
    airfoils = std::move(kept_airfoils);
  }

  const json split_cfg = config.value("split", json::object());
  SplitRatios ratios;
  if (split_cfg.contains("ratios")) {
    for (std::size_t k = 0; k < 3; ++k) ratios.values[k] = split_cfg["ratios"].at(k).get<double>();
  }
  const bool stratified = split_cfg.value("stratified", true);
  if (m.samples.size() >= 3) split_dataset(m, ratios, derive_seed(seed, 0x5eed), stratified);

  for (std::size_t i = 0; i < m.samples.size(); ++i) write_dat(airfoils[i], out_dir / m.samples[i].file);

  m.created = now_utc();
  m.config = ordered_json::parse(config.dump());
  m.config["seed"] = seed;
  m.config["point_count"] = point_count;
  m.config["keypoint_count"] = keypoint_count;
  m.config["cst_degree"] = cst_degree;
  m.config["split"] = {{"ratios", ratios.values}, {"stratified", stratified}};
  m.config["solver"] = aero.solver ? aero.solver->string() : std::string("none");
  m.config["version"] = kVersion;
  write_manifest(m, out_dir / kManifestFile);
  return m;
}

DatasetManifest build_dataset(const std::filesystem::path& config_file, const std::filesystem::path& out_dir,
                              const BuildOverrides& overrides) {
  std::ifstream is(config_file);
  if (!is) throw Error(ErrorCode::not_found, "build_dataset: cannot read " + config_file.string());
  json config;
  try {
    config = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, config_file.string() + ": " + e.what());
  }
  return build_dataset(config, config_file.parent_path(), out_dir, overrides);
}

Airfoil load_sample(const std::filesystem::path& dataset_dir, const SampleEntry& sample) {
  Airfoil a = read_dat(dataset_dir / sample.file);
  a.provenance = sample.provenance;
  return a;
}

DatasetManifest filter_dataset(const std::filesystem::path& dir, AeroSolver* solver, unsigned workers) {
  DatasetManifest m = read_manifest(dir / kManifestFile);
  std::vector<Airfoil> airfoils;
  airfoils.reserve(m.samples.size());
  for (const auto& s : m.samples) airfoils.push_back(load_sample(dir, s));
  PolarCache cache(dir / kPolarCacheFile);
  const auto grid = condition_grid();
  const auto polars = evaluate_batch(airfoils, grid, solver, cache, workers);
  const auto fr = filter_airfoils(airfoils.size(), polars);
  std::vector<SampleEntry> kept;
  for (auto i : fr.kept) {
    m.samples[i].aero = AeroStatus::annotated;
    kept.push_back(std::move(m.samples[i]));
  }
  for (auto i : fr.discarded) m.discarded.push_back(m.samples[i].id);
  m.samples = std::move(kept);
  if (solver) m.config["solver"] = solver->name();
  write_manifest(m, dir / kManifestFile);
  return m;
}

std::vector<std::string> validate_dataset(const std::filesystem::path& dir) {
  std::vector<std::string> issues;
  DatasetManifest m;
  try {
    m = read_manifest(dir / kManifestFile);
  } catch (const Error& e) {
    return {e.what()};
  }
  const std::size_t n = m.config.value("point_count", kCanonicalPointCount);
  std::set<std::string> ids;
  std::array<std::size_t, 3> per_split{};
  std::unique_ptr<PolarCache> cache;
  const auto grid = condition_grid();
  for (const auto& s : m.samples) {
    if (!ids.insert(s.id).second) issues.push_back("duplicate id " + s.id);
    ++per_split[static_cast<std::size_t>(s.split)];
    for (double v : s.parsec.to_array()) {
      if (!std::isfinite(v)) issues.push_back(s.id + ": non-finite PARSEC value");
    }
    Airfoil a;
    try {
      a = read_dat(dir / s.file, n);
      std::ifstream is(dir / s.file);
      if (parse_dat(is).points.size() != n) issues.push_back(s.id + ": file is not canonical");
      for (const auto& v : validate(a, n)) issues.push_back(s.id + ": " + v);
    } catch (const Error& e) {
      issues.push_back(s.id + ": " + e.what());
      continue;
    }
    for (const auto& k : s.keypoints) {
      if (std::find(a.points.begin(), a.points.end(), k) == a.points.end()) {
        issues.push_back(s.id + ": keypoint not on contour");
        break;
      }
    }
    if (s.aero == AeroStatus::annotated) {
      if (!cache) {
        try {
          cache = std::make_unique<PolarCache>(PolarCache::load(dir / kPolarCacheFile));
        } catch (const Error& e) {
          issues.push_back(std::string("polar cache: ") + e.what());
          cache = std::make_unique<PolarCache>();
        }
      }
      const auto h = airfoil_hash(a);
      for (const auto& c : grid) {
        if (!cache->find(h, c)) {
          issues.push_back(s.id + ": missing polar records");
          break;
        }
      }
    }
  }
  if (m.samples.size() >= 3 && m.config.contains("split")) {
    SplitRatios r;
    for (std::size_t k = 0; k < 3; ++k) r.values[k] = m.config["split"]["ratios"].at(k).get<double>();
    for (std::size_t k = 0; k < 3; ++k) {
      const double expected = r.values[k] * static_cast<double>(m.samples.size());
      // Stratified rounding may move one sample per provenance group.
      std::set<Provenance> groups;
      for (const auto& s : m.samples) groups.insert(s.provenance);
      if (std::abs(static_cast<double>(per_split[k]) - expected) > static_cast<double>(groups.size()) + 1.0) {
        issues.push_back("split " + std::string(to_string(static_cast<Split>(k))) + " count far from ratio");
      }
    }
  }
  return issues;
}

}  // namespace afbench
