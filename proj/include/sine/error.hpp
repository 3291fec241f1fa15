#pragma once

#include <stdexcept>
#include <string>

namespace sine {

// Malformed instance or report input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that asks for something we do not read (e.g. EXPLICIT weights).
class UnsupportedFormat : public ParseError {
 public:
  using ParseError::ParseError;
};

// A precondition on the mathematical inputs failed (m > n, odd matching set, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Zero-length edge where the visibility term 1/d is required.
class DegenerateGeometry : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal invariant; indicates a bug rather than bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sine
