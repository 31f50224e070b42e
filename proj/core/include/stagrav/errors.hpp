#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stagrav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public Error {
 public:
  UnknownIdentifierError(const std::string& name, std::size_t offset)
      : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        name_(name),
        offset_(offset) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

/// Evaluation left the real domain of an expression (sqrt of a negative,
/// division by zero, non-finite result).
class DomainError : public Error {
 public:
  DomainError(const std::string& what_failed, const std::string& subexpression)
      : Error(what_failed + " in '" + subexpression + "'"), subexpression_(subexpression) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

class SingularTetradError : public Error {
 public:
  using Error::Error;
};

/// A differential operator was applied to a jet with no derivative levels left.
class JetOrderError : public Error {
 public:
  using Error::Error;
};

class MissingFieldError : public Error {
 public:
  using Error::Error;
};

class RegionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace stagrav
