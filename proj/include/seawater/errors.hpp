#pragma once

#include <stdexcept>
#include <string>

namespace seawater {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parameters or configuration values outside their admissible range.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Missing or contradictory command-line input.
class UsageError : public Error {
public:
  using Error::Error;
};

// profiles
class DegenerateCase : public Error {
public:
  using Error::Error;
};
class InfeasibleRoot : public Error {
public:
  using Error::Error;
};

// mesh
class ParseError : public Error {
public:
  using Error::Error;
};
class AdmissibilityError : public Error {
public:
  AdmissibilityError(const std::string &what, int cell_k, int cell_l)
      : Error(what), cell_k_(cell_k), cell_l_(cell_l) {}
  /// Cells on either side of the offending edge.
  int cell_k() const noexcept { return cell_k_; }
  int cell_l() const noexcept { return cell_l_; }

private:
  int cell_k_;
  int cell_l_;
};
class NegativeMeasure : public Error {
public:
  using Error::Error;
};

// scheme
class LinearSolveFailure : public Error {
public:
  using Error::Error;
};
class StepUnderflow : public Error {
public:
  using Error::Error;
};
class NotStationary : public Error {
public:
  using Error::Error;
};

// diagnostics
class InsufficientData : public Error {
public:
  using Error::Error;
};
class NonPositiveEnergy : public Error {
public:
  using Error::Error;
};

} // namespace seawater
