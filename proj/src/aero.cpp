#include "afbench/aero.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "afbench/dat_io.hpp"
#include "afbench/error.hpp"
#include "afbench/parallel.hpp"

namespace afbench {

std::vector<WorkCondition> condition_grid() {
  std::vector<WorkCondition> grid;
  grid.reserve(kConditionCount);
  for (int ma = 2; ma <= 7; ++ma) {
    for (int cl = 0; cl <= 20; cl += 2) grid.push_back({kReynolds, ma / 10.0, cl / 10.0});
  }
  return grid;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::numerical, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string airfoil_hash(const Airfoil& airfoil) {
  std::string bytes;
  bytes.reserve(airfoil.points.size() * 16);
  auto put = [&](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>(bits >> (8 * i)));
  };
  for (const auto& p : airfoil.points) {
    put(p.x);
    put(p.y);
  }
  return sha256_hex(bytes);
}

std::string format_shortest(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error(ErrorCode::numerical, "format_shortest: conversion failed");
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::parse_error, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

// Process execution ----------------------------------------------------------

ProcessResult run_process(const std::filesystem::path& executable, const std::string& stdin_data,
                          const std::filesystem::path& working_dir, std::chrono::milliseconds timeout) {
  int in_pipe[2];
  if (pipe(in_pipe) != 0) throw Error(ErrorCode::numerical, "run_process: pipe failed");
  const pid_t pid = fork();
  if (pid < 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorCode::numerical, "run_process: fork failed");
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    const int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) {
      dup2(devnull, STDOUT_FILENO);
      dup2(devnull, STDERR_FILENO);
      close(devnull);
    }
    if (chdir(working_dir.c_str()) != 0) _exit(126);
    const std::string exe = executable.string();
    execl(exe.c_str(), exe.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  // The child may exit before reading everything; ignore EPIPE.
  std::signal(SIGPIPE, SIG_IGN);
  std::size_t written = 0;
  while (written < stdin_data.size()) {
    const auto n = write(in_pipe[1], stdin_data.data() + written, stdin_data.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      return result;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      result.timed_out = true;
      return result;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

// XFoil -------------------------------------------------------------------------

XfoilSolver::XfoilSolver(XfoilOptions options) : options_(std::move(options)) {
  if (!std::filesystem::exists(options_.executable)) {
    throw Error(ErrorCode::aero_unavailable, "solver executable not found: " + options_.executable.string());
  }
}

std::string XfoilSolver::command_script(const std::string& dat_file, const std::string& polar_file,
                                        const WorkCondition& c, const XfoilOptions& options) {
  std::ostringstream s;
  s << "PLOP\nG F\n\n"
    << "LOAD " << dat_file << "\n"
    << "PPAR\nN " << options.panels << "\n\n\n"
    << "OPER\n"
    << "VISC " << format_shortest(c.re) << "\n"
    << "MACH " << format_shortest(c.ma) << "\n"
    << "ITER " << options.max_iterations << "\n"
    << "PACC\n" << polar_file << "\n\n"
    << "CL " << format_shortest(c.cl) << "\n"
    << "PACC\n\n"
    << "QUIT\n";
  return s.str();
}

std::optional<PolarPoint> parse_xfoil_polar(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  bool in_table = false;
  std::optional<PolarPoint> last;
  while (std::getline(is, line)) {
    if (!in_table) {
      if (line.find("------") != std::string::npos) in_table = true;
      continue;
    }
    std::istringstream ls(line);
    double alpha, cl, cd, cdp, cm;
    if (ls >> alpha >> cl >> cd >> cdp >> cm) {
      if (std::isfinite(alpha) && std::isfinite(cd) && std::isfinite(cm)) last = PolarPoint{alpha, cd, cm};
    }
  }
  return last;
}

std::optional<PolarPoint> XfoilSolver::solve(const Airfoil& airfoil, const WorkCondition& condition) {
  static std::atomic<std::uint64_t> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("afbench-xfoil-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  std::optional<PolarPoint> out;
  try {
    Airfoil named = airfoil;
    named.name = "afbench";
    write_dat(named, dir / "airfoil.dat", DatWriteOptions{6});
    const auto script = command_script("airfoil.dat", "polar.txt", condition, options_);
    const auto r = run_process(options_.executable, script, dir, options_.timeout);
    if (!r.timed_out) {
      std::ifstream is(dir / "polar.txt");
      if (is) {
        std::stringstream buf;
        buf << is.rdbuf();
        out = parse_xfoil_polar(buf.str());
      }
    }
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    throw;
  }
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  return out;
}

// Cache ---------------------------------------------------------------------------

PolarCache::PolarCache(std::filesystem::path file) : file_(std::move(file)) {
  if (std::filesystem::exists(*file_)) {
    std::ifstream is(*file_);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto [hash, rec] = parse_line(line);
      records_[key(hash, rec.condition)] = {hash, rec};
    }
  }
}

PolarCache::PolarCache(PolarCache&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  file_ = std::move(other.file_);
  records_ = std::move(other.records_);
}

std::string PolarCache::key(const std::string& hash, const WorkCondition& c) {
  return hash + '\t' + format_shortest(c.re) + '\t' + format_shortest(c.ma) + '\t' + format_shortest(c.cl);
}

std::string PolarCache::format_line(const std::string& hash, const PolarRecord& r) {
  const double nan = std::nan("");
  std::string s = key(hash, r.condition);
  s += '\t';
  s += r.converged() ? '1' : '0';
  for (double v : {r.result ? r.result->aoa : nan, r.result ? r.result->cd : nan, r.result ? r.result->cm : nan}) {
    s += '\t';
    s += format_shortest(v);
  }
  return s;
}

std::pair<std::string, PolarRecord> PolarCache::parse_line(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    f.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (f.size() != 8 || (f[4] != "0" && f[4] != "1")) {
    throw Error(ErrorCode::parse_error, "polar cache: malformed line '" + std::string(line) + "'");
  }
  PolarRecord r;
  r.condition = {parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
  if (f[4] == "1") r.result = PolarPoint{parse_double(f[5]), parse_double(f[6]), parse_double(f[7])};
  return {std::string(f[0]), r};
}

std::optional<PolarRecord> PolarCache::find(const std::string& hash, const WorkCondition& c) const {
  std::shared_lock lock(mutex_);
  const auto it = records_.find(key(hash, c));
  if (it == records_.end()) return std::nullopt;
  return it->second.second;
}

void PolarCache::insert(const std::string& hash, const PolarRecord& record) {
  std::unique_lock lock(mutex_);
  const auto k = key(hash, record.condition);
  if (records_.contains(k)) return;  // records are immutable once written
  records_[k] = {hash, record};
  if (file_) {
    std::ofstream os(*file_, std::ios::app | std::ios::binary);
    os << format_line(hash, record) << '\n';
  }
}

std::size_t PolarCache::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

void PolarCache::save(const std::filesystem::path& file) const {
  std::shared_lock lock(mutex_);
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::not_found, "polar cache: cannot write " + file.string());
  for (const auto& [k, v] : records_) os << format_line(v.first, v.second) << '\n';
}

PolarCache PolarCache::load(const std::filesystem::path& file) {
  PolarCache c;
  std::ifstream is(file);
  if (!is) throw Error(ErrorCode::not_found, "polar cache: cannot read " + file.string());
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto [hash, rec] = parse_line(line);
    c.records_[key(hash, rec.condition)] = {hash, rec};
  }
  return c;
}

// Evaluation ----------------------------------------------------------------------

std::vector<PolarRecord> evaluate_airfoil(const Airfoil& airfoil, std::span<const WorkCondition> conditions,
                                          AeroSolver* solver, PolarCache& cache) {
  const std::string hash = airfoil_hash(airfoil);
  std::vector<PolarRecord> out;
  out.reserve(conditions.size());
  for (const auto& c : conditions) {
    if (auto hit = cache.find(hash, c)) {
      out.push_back(*hit);
      continue;
    }
    if (!solver) {
      throw Error(ErrorCode::aero_unavailable, "aero unavailable: no solver configured and cache miss for " +
                                                   hash.substr(0, 12));
    }
    PolarRecord r{c, solver->solve(airfoil, c)};
    cache.insert(hash, r);
    out.push_back(r);
  }
  return out;
}

std::vector<std::vector<PolarRecord>> evaluate_batch(std::span<const Airfoil> airfoils,
                                                     std::span<const WorkCondition> conditions,
                                                     AeroSolver* solver, PolarCache& cache,
                                                     unsigned pool_size) {
  std::vector<std::string> hashes(airfoils.size());
  for (std::size_t i = 0; i < airfoils.size(); ++i) hashes[i] = airfoil_hash(airfoils[i]);
  std::vector<std::vector<PolarRecord>> out(airfoils.size(), std::vector<PolarRecord>(conditions.size()));
  const std::size_t m = conditions.size();
  parallel_for(airfoils.size() * m, pool_size == 0 ? default_workers() : pool_size, [&](std::size_t task) {
    const std::size_t a = task / m, c = task % m;
    if (auto hit = cache.find(hashes[a], conditions[c])) {
      out[a][c] = *hit;
      return;
    }
    if (!solver) {
      throw Error(ErrorCode::aero_unavailable, "aero unavailable: no solver configured and cache miss");
    }
    PolarRecord r{conditions[c], solver->solve(airfoils[a], conditions[c])};
    cache.insert(hashes[a], r);
    out[a][c] = r;
  });
  return out;
}

std::vector<bool> convergence_vector(std::span<const PolarRecord> records) {
  std::vector<bool> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(r.converged());
  return v;
}

FilterResult filter_airfoils(std::size_t batch_size, std::span<const std::vector<PolarRecord>> polars) {
  if (polars.size() != batch_size) {
    throw Error(ErrorCode::invalid_argument, "filter_airfoils: polars missing for some airfoils");
  }
  const auto grid = condition_grid();
  FilterResult out;
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto& recs = polars[i];
    bool covered = recs.size() >= grid.size();
    for (const auto& c : grid) {
      if (!covered) break;
      covered = std::any_of(recs.begin(), recs.end(), [&](const PolarRecord& r) { return r.condition == c; });
    }
    if (!covered) {
      throw Error(ErrorCode::invalid_argument,
                  "filter_airfoils: incomplete polar coverage for airfoil " + std::to_string(i));
    }
    const bool any = std::any_of(recs.begin(), recs.end(), [](const PolarRecord& r) { return r.converged(); });
    (any ? out.kept : out.discarded).push_back(i);
  }
  return out;
}

// Config --------------------------------------------------------------------------

AeroConfig load_aero_config(const std::optional<std::filesystem::path>& file) {
  AeroConfig cfg;
  auto set_solver = [&](const std::string& s) {
    if (s.empty() || s == "none") {
      cfg.solver.reset();
    } else {
      cfg.solver = s;
    }
  };
  if (file) {
    std::ifstream is(*file);
    if (!is) throw Error(ErrorCode::not_found, "aero config: cannot read " + file->string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, std::string("aero config: ") + e.what());
    }
    if (j.contains("solver")) set_solver(j["solver"].get<std::string>());
    if (j.contains("timeout_s")) cfg.timeout = std::chrono::milliseconds(std::llround(j["timeout_s"].get<double>() * 1000));
    if (j.contains("pool_size")) cfg.pool_size = j["pool_size"].get<unsigned>();
  }
  if (const char* s = std::getenv("AFBENCH_SOLVER")) set_solver(s);
  if (const char* s = std::getenv("AFBENCH_SOLVER_TIMEOUT")) {
    cfg.timeout = std::chrono::milliseconds(std::llround(parse_double(s) * 1000));
  }
  if (const char* s = std::getenv("AFBENCH_POOL_SIZE")) cfg.pool_size = static_cast<unsigned>(std::stoul(s));
  return cfg;
}

std::unique_ptr<AeroSolver> make_solver(const AeroConfig& config) {
  if (!config.solver) return nullptr;
  XfoilOptions o;
  o.executable = *config.solver;
  o.timeout = config.timeout;
  return std::make_unique<XfoilSolver>(o);
}

}  // namespace afbench
