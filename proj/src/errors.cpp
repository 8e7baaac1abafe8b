#include "pce/errors.hpp"

namespace pce {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidSpin: return "invalid-spin";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::IndexOutOfRange: return "index-out-of-range";
    case ErrorKind::NonHermitian: return "non-hermitian";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::ModelViolation: return "model-violation";
    case ErrorKind::PopulationInversion: return "population-inversion";
    case ErrorKind::NegativeEfficiency: return "negative-efficiency";
    case ErrorKind::AboveThreshold: return "above-threshold";
    case ErrorKind::InfeasibleSchedule: return "infeasible-schedule";
    case ErrorKind::CutoffTooSmall: return "cutoff-too-small";
    case ErrorKind::NonUniqueSteadyState: return "non-unique-steady-state";
    case ErrorKind::NonInvariantSector: return "non-invariant-sector";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::UndefinedRSquared: return "undefined-r-squared";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace pce
