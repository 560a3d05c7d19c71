#include "sirsat/error.hpp"

namespace sirsat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::structure: return "structure";
    case ErrorKind::absent_hopf: return "absent_hopf";
    case ErrorKind::detection: return "detection";
  }
  return "unknown";
}

bool is_numeric_failure(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::stiffness:
    case ErrorKind::structure:
    case ErrorKind::absent_hopf:
    case ErrorKind::detection:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace sirsat
