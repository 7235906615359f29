#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fibers {

enum class ErrorKind {
  invalid_argument,
  parse_error,
  overflow,
  unlanded_ray,
  ambiguous_clustering,
  trace_failure,
  not_a_pair,
  not_simple,
  point_on_curve,
  no_alpha_pair,
  on_boundary,
  no_convergence,
  io_error,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::unlanded_ray: return "unlanded-ray";
    case ErrorKind::ambiguous_clustering: return "ambiguous-clustering";
    case ErrorKind::trace_failure: return "trace-failure";
    case ErrorKind::not_a_pair: return "not-a-pair";
    case ErrorKind::not_simple: return "not-simple";
    case ErrorKind::point_on_curve: return "point-on-curve";
    case ErrorKind::no_alpha_pair: return "no-alpha-pair";
    case ErrorKind::on_boundary: return "on-boundary";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

/// Every operation-level failure in the library is reported as an Error
/// carrying a machine-readable kind; the CLI maps it to a nonzero exit.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fibers
