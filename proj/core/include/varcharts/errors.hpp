#pragma once

#include <stdexcept>
#include <string>

namespace varcharts {

/// AR polynomial has a root on or inside the unit circle.
struct CausalityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A recursion produced a value that is impossible for valid inputs
/// (e.g. a non-positive prediction mean-square error).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Chart scheme has no update rule for the requested process kind.
struct UnsupportedSchemeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Run configuration failed validation; message names the offending field.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Control-limit search failed to bracket or converge.
struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A Monte-Carlo estimate could not be formed (e.g. no accepted runs).
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace varcharts
