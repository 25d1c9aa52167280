#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flexoiga {

/// Failure categories reported by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  InvalidArgument,
  OutOfDomain,
  DegenerateGeometry,
  NonconformingInterface,
  SingularMaterial,
  OverConstrained,
  NotApplicable,
  SolverFailure,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace flexoiga
