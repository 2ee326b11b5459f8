#pragma once

#include <stdexcept>
#include <string>

namespace hydrosim {

/// Input could not be parsed (syntax error, bad enum value, unknown key, ...).
/// `position` is a byte offset into the input when known, -1 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, long position = -1)
      : std::runtime_error(std::move(message)), position_(position) {}

  long position() const { return position_; }

 private:
  long position_;
};

/// Input parsed but violates a documented invariant (named field + offender).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The engine produced a trace that fails its own self-checks. CLI exit 2.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hydrosim
