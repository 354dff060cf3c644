#include "heatda/error.hpp"

namespace heatda {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Structure: return "mesh structure";
    case ErrorKind::BoundaryViolation: return "boundary violation";
    case ErrorKind::DegenerateMesh: return "degenerate mesh";
    case ErrorKind::AssemblyInvariant: return "assembly invariant";
    case ErrorKind::SolverSingular: return "singular system";
    case ErrorKind::SolverTolerance: return "solver tolerance";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "i/o";
  }
  return "unknown";
}

}  // namespace heatda
