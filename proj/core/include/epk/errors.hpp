#ifndef EPK_ERRORS_HPP
#define EPK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epk {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A rate or state violates a declared invariant (negativity, bad bounds, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A formula denominator vanishes or a required-positive rate is zero.
class DegenerateParameterError : public Error {
public:
  using Error::Error;
};

/// Two quantities that must share a time grid do not.
class GridMismatchError : public Error {
public:
  using Error::Error;
};

/// Observed and model series have different lengths.
class LengthMismatchError : public Error {
public:
  using Error::Error;
};

/// An integrator stage produced NaN or Inf.
class NonFiniteStateError : public Error {
public:
  using Error::Error;
};

/// An effort weight that divides a control update is zero.
class ZeroEffortWeightError : public Error {
public:
  using Error::Error;
};

/// A fit or sampling bound interval is empty or inverted.
class InvalidBoundsError : public Error {
public:
  using Error::Error;
};

/// Not enough samples for the requested statistic.
class InsufficientSamplesError : public Error {
public:
  using Error::Error;
};

/// A design column is constant after ranking; partial correlation undefined.
class SingularDesignError : public Error {
public:
  using Error::Error;
};

/// A text input could not be parsed; message carries file and line.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Filesystem failure while reading or writing artifacts.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace epk

#endif
