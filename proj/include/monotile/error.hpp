#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace monotile {

enum class ErrorKind {
  malformed_input,
  capacity,
  degenerate_element,
  unsupported_backend,
  not_loxodromic,
  precondition,
  consistency_violation,
  search_budget,
  insufficient_work_radius,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_input: return "malformed_input";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::degenerate_element: return "degenerate_element";
    case ErrorKind::unsupported_backend: return "unsupported_backend";
    case ErrorKind::not_loxodromic: return "not_loxodromic";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::consistency_violation: return "consistency_violation";
    case ErrorKind::search_budget: return "search_budget";
    case ErrorKind::insufficient_work_radius: return "insufficient_work_radius";
  }
  return "unknown";
}

// Every failure raised by the library carries a stable kind; the CLI maps it
// onto the "error_kind" field of its error documents.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace monotile
