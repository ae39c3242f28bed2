#pragma once

#include <stdexcept>
#include <string>

namespace osclab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation requested outside a declared validity box.
struct DomainError : Error {
  using Error::Error;
};

// Structure matrix lost rank (smallest singular value under the floor).
struct DegeneracyError : Error {
  using Error::Error;
};

// Ray flow stopped being injective; carries the time of onset.
struct CausticError : Error {
  double s_onset;
  CausticError(const std::string& msg, double s) : Error(msg), s_onset(s) {}
};

// An internal residual check came out above its tolerance.
struct AccuracyError : Error {
  using Error::Error;
};

// A sampling rule was violated; message names the offending axis.
struct ResolutionError : Error {
  using Error::Error;
};

// Requested band does not fit under the grid Nyquist frequency.
struct AliasingError : Error {
  using Error::Error;
};

// Scale arguments supplied in the wrong order (caller must sort).
struct ArgumentOrderError : Error {
  using Error::Error;
};

// Hypothesis of the estimate under test fails on the given inputs.
struct PreconditionError : Error {
  using Error::Error;
};

// Bad regression input: nonpositive values or degenerate abscissae.
struct FitError : Error {
  using Error::Error;
};

// Samples do not span enough decades for the requested fit.
struct FitDomainError : FitError {
  using FitError::FitError;
};

// Input exceeds the supported desk-scale caps.
struct ScaleError : Error {
  using Error::Error;
};

// Discrete operator failed a structural check (e.g. self-adjointness).
struct DiscretizationError : Error {
  using Error::Error;
};

// Malformed experiment description or misused entry point.
struct UsageError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace osclab
