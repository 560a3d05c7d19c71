#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sirsat {

enum class ErrorKind {
  invalid_input,
  domain,
  stiffness,
  precondition,
  singularity,
  degenerate,
  out_of_range,
  structure,
  absent_hopf,
  detection,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Numeric failures (bracketing, detection) are distinguished from bad input
// so that callers such as the CLI can map them to different exit codes.
bool is_numeric_failure(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sirsat
