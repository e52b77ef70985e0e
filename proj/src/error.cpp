#include "venation/error.hpp"

namespace venation {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGrid: return "invalid grid";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::ZeroDenominator: return "zero denominator";
    case ErrorKind::NonFinite: return "non-finite value";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::Assembly: return "assembly error";
    case ErrorKind::IncompatibleSource: return "incompatible source";
    case ErrorKind::NotConverged: return "solver did not converge";
    case ErrorKind::PivotFailure: return "step rejected";
    case ErrorKind::SingularCoefficient: return "singular coefficient";
    case ErrorKind::UnsupportedExponent: return "unsupported exponent";
    case ErrorKind::NotFound: return "not found";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Io: return "I/O error";
  }
  return "unknown error";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::NotFound:
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidGrid:
      return exit_code::kConfig;
    case ErrorKind::Io:
      return exit_code::kIo;
    default:
      return exit_code::kNumerical;
  }
}

}  // namespace venation
