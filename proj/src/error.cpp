#include "flexoiga/error.hpp"

namespace flexoiga {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::DegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::NonconformingInterface: return "nonconforming-interface";
    case ErrorKind::SingularMaterial: return "singular-material";
    case ErrorKind::OverConstrained: return "over-constrained";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::ConfigError: return "config-error";
    case ErrorKind::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace flexoiga
