#pragma once

#include <stdexcept>
#include <string>

namespace heatda {

enum class ErrorKind {
  InvalidArgument,
  Structure,
  BoundaryViolation,
  DegenerateMesh,
  AssemblyInvariant,
  SolverSingular,
  SolverTolerance,
  Validation,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers (and the C
/// API) which failure class occurred.
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

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace heatda
