#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wps {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the range where the model is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument (unitarity, POVM validity, label sets) failed.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The post-selection amplitude <bwd|fwd> vanishes, so weak values are undefined.
class SingularPostselectionError : public Error {
 public:
  using Error::Error;
};

/// The states to be discriminated coincide (epsilon = 0).
class DegenerateFamilyError : public Error {
 public:
  using Error::Error;
};

/// An optical setup leaves a mode unrouted or reuses a detector mode.
class WiringError : public Error {
 public:
  using Error::Error;
};

/// Scenario text could not be parsed; carries the 1-based position when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace wps
