#include "concentra/errors.hpp"

namespace concentra {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Representation: return "representation";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Degeneracy: return "degeneracy";
    case ErrorKind::Positivity: return "positivity";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::Domain:
    case ErrorKind::Io:
      return 2;
    case ErrorKind::Degeneracy:
    case ErrorKind::Positivity:
      return 4;
    default:
      return 3;
  }
}

}  // namespace concentra
