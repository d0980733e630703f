#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "afbench/geometry.hpp"

namespace afbench {

struct DatWriteOptions {
  /// Fixed decimals; negative writes the shortest round-trip form.
  int decimals = -1;
};

/// Name line, then one "x y" pair per line.
void write_dat(const Airfoil& airfoil, std::ostream& os, const DatWriteOptions& options = {});
void write_dat(const Airfoil& airfoil, const std::filesystem::path& path,
               const DatWriteOptions& options = {});

struct DatContents {
  std::string name;
  std::vector<Point2> points;  // Selig order
  bool was_lednicer = false;
};

/// Parses Selig or Lednicer layout (auto-detected). Lednicer is converted to
/// Selig. Throws Error(parse_error) with the offending line number.
DatContents parse_dat(std::istream& is);

/// Reads and canonicalizes to `n` points. Files with a different point count
/// are resampled and a warning is appended to `warnings` when provided.
Airfoil read_dat(const std::filesystem::path& path, std::size_t n = kCanonicalPointCount,
                 std::vector<std::string>* warnings = nullptr);

}  // namespace afbench
