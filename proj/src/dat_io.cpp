#include "afbench/dat_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "afbench/aero.hpp"
#include "afbench/error.hpp"

namespace afbench {

void write_dat(const Airfoil& airfoil, std::ostream& os, const DatWriteOptions& options) {
  os << (airfoil.name.empty() ? std::string("airfoil") : airfoil.name) << '\n';
  char buf[64];
  for (const auto& p : airfoil.points) {
    if (options.decimals >= 0) {
      std::snprintf(buf, sizeof buf, "%.*f %.*f", options.decimals, p.x, options.decimals, p.y);
      os << buf << '\n';
    } else {
      os << format_shortest(p.x) << ' ' << format_shortest(p.y) << '\n';
    }
  }
}

void write_dat(const Airfoil& airfoil, const std::filesystem::path& path, const DatWriteOptions& options) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::not_found, "write_dat: cannot open " + path.string());
  write_dat(airfoil, os, options);
  if (!os) throw Error(ErrorCode::parse_error, "write_dat: write failed for " + path.string());
}

namespace {

// Two numbers on a line; false if the line is not numeric.
bool parse_pair(const std::string& line, double& a, double& b) {
  std::istringstream ss(line);
  std::string sa, sb, extra;
  if (!(ss >> sa >> sb) || (ss >> extra)) return false;
  try {
    a = parse_double(sa);
    b = parse_double(sb);
  } catch (const Error&) {
    return false;
  }
  return true;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

DatContents parse_dat(std::istream& is) {
  DatContents out;
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.emplace_back(number, line);
  }

  std::size_t i = 0;
  while (i < lines.size() && blank(lines[i].second)) ++i;
  double a = 0.0, b = 0.0;
  if (i < lines.size() && !parse_pair(lines[i].second, a, b)) {
    out.name = lines[i].second;
    const auto first = out.name.find_first_not_of(" \t");
    out.name = first == std::string::npos ? "" : out.name.substr(first);
    ++i;
  }

  std::vector<std::vector<Point2>> blocks(1);
  for (; i < lines.size(); ++i) {
    const auto& [ln, text] = lines[i];
    if (blank(text)) {
      if (!blocks.back().empty()) blocks.emplace_back();
      continue;
    }
    if (!parse_pair(text, a, b)) {
      throw Error(ErrorCode::parse_error, "read_dat: malformed numeric line " + std::to_string(ln) +
                                              ": '" + text + "'");
    }
    blocks.back().push_back({a, b});
  }
  if (blocks.back().empty()) blocks.pop_back();

  std::vector<Point2> all;
  for (const auto& blk : blocks) all.insert(all.end(), blk.begin(), blk.end());

  // Lednicer: a count line (both values > 1), then upper LE->TE, then lower LE->TE.
  if (!all.empty() && all.front().x > 1.5 && all.front().y > 1.5) {
    const auto nu = static_cast<std::size_t>(std::llround(all.front().x));
    const auto nl = static_cast<std::size_t>(std::llround(all.front().y));
    if (nu + nl != all.size() - 1) {
      throw Error(ErrorCode::parse_error, "read_dat: Lednicer counts " + std::to_string(nu) + "+" +
                                              std::to_string(nl) + " do not match " +
                                              std::to_string(all.size() - 1) + " coordinate lines");
    }
    std::vector<Point2> upper(all.begin() + 1, all.begin() + 1 + static_cast<std::ptrdiff_t>(nu));
    std::vector<Point2> lower(all.begin() + 1 + static_cast<std::ptrdiff_t>(nu), all.end());
    out.points.assign(upper.rbegin(), upper.rend());
    std::size_t skip = (!lower.empty() && !out.points.empty() && lower.front() == out.points.back()) ? 1 : 0;
    out.points.insert(out.points.end(), lower.begin() + static_cast<std::ptrdiff_t>(skip), lower.end());
    out.was_lednicer = true;
  } else {
    out.points = std::move(all);
  }
  if (out.points.size() < 10) {
    throw Error(ErrorCode::parse_error,
                "read_dat: need at least 10 points, found " + std::to_string(out.points.size()));
  }
  return out;
}

Airfoil read_dat(const std::filesystem::path& path, std::size_t n, std::vector<std::string>* warnings) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::not_found, "read_dat: cannot open " + path.string());
  DatContents c;
  try {
    c = parse_dat(is);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  if (c.points.size() != n && warnings) {
    warnings->push_back(path.string() + ": resampled from " + std::to_string(c.points.size()) + " to " +
                        std::to_string(n) + " points");
  }
  Airfoil a = resample_airfoil(c.points, n);
  a.name = c.name.empty() ? path.stem().string() : c.name;
  return a;
}

}  // namespace afbench
