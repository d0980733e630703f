#include "afbench/error.hpp"

namespace afbench {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::degenerate_geometry: return "degenerate_geometry";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::rank_deficient: return "rank_deficient";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::aero_unavailable: return "aero_unavailable";
    case ErrorCode::numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace afbench
