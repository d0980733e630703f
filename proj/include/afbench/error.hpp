#pragma once

#include <stdexcept>
#include <string>

namespace afbench {

enum class ErrorCode {
  invalid_argument,
  degenerate_geometry,
  out_of_range,
  rank_deficient,
  parse_error,
  not_found,
  aero_unavailable,
  numerical,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` lets callers (CLI, service)
/// map failures onto exit codes or HTTP statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace afbench
