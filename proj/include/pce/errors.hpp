#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace pce {

enum class ErrorKind {
  InvalidArgument,
  InvalidSpin,
  DimensionMismatch,
  IndexOutOfRange,
  NonHermitian,
  InvalidState,
  ModelViolation,
  PopulationInversion,
  NegativeEfficiency,
  AboveThreshold,
  InfeasibleSchedule,
  CutoffTooSmall,
  NonUniqueSteadyState,
  NonInvariantSector,
  InsufficientData,
  UndefinedRSquared,
  NonConvergence,
  Config,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that callers
/// (the CLI in particular) can map it to an exit code without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Compact %g rendering for numbers in messages.
inline std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace pce
