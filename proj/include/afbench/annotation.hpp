#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "afbench/geometry.hpp"

namespace afbench {

inline constexpr std::size_t kParsecCount = 11;

/// The eleven PARSEC geometric labels. Crest second derivatives are raw
/// d2y/dx2; trailing-edge angles are in degrees, positive for a closing wedge.
struct ParsecParams {
  double r_le = 0.0;
  double x_up = 0.0;
  double y_up = 0.0;
  double zxx_up = 0.0;
  double x_lo = 0.0;
  double y_lo = 0.0;
  double zxx_lo = 0.0;
  double y_te = 0.0;
  double dy_te = 0.0;
  double alpha_te = 0.0;
  double beta_te = 0.0;

  /// Fixed order: R_le, X_up, Y_up, Z_xxup, X_lo, Y_lo, Z_xxlo, Y_te, dY_te, alpha_te, beta_te.
  std::array<double, kParsecCount> to_array() const;
  static ParsecParams from_array(const std::array<double, kParsecCount>& v);
};

/// Field names in the fixed order used by to_array().
const std::array<std::string_view, kParsecCount>& parsec_names();

/// Index of a field name; throws for unknown names.
std::size_t parsec_index(std::string_view name);

/// Any subset of the eleven values, in to_array() order.
using ParsecTargets = std::array<std::optional<double>, kParsecCount>;

ParsecTargets full_targets(const ParsecParams& p);

ParsecParams annotate_parsec(const Airfoil& airfoil);

struct SigmaReport {
  std::array<double, kParsecCount> sigma{};
  double sigma_bar = 0.0;
};

SigmaReport label_error(const ParsecParams& predicted, const ParsecParams& target);

/// Componentwise mean of the reports; sigma_bar is the mean of per-report sigma_bar.
SigmaReport mean_label_error(std::span<const SigmaReport> reports);

}  // namespace afbench
