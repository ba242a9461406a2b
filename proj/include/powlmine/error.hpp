#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace powlmine {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input, bad encoding, or a file that cannot be opened.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (XML, CSV, JSON). Carries a 1-based position when known.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : InputError(what + " (line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A record is missing a mandatory attribute while parsing in strict mode.
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

/// Parsing succeeded but produced nothing usable.
class EmptyInputError : public InputError {
 public:
  using InputError::InputError;
};

/// Bad user configuration (column mapping, generator parameters, caps).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A model document does not follow the JSON model schema, or a model
/// violates its structural invariants.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bounded exploration hit its state budget before reaching a verdict.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::size_t budget)
      : Error(what + " (budget " + std::to_string(budget) + ")"), budget_(budget) {}

  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t budget_;
};

/// A combinatorial enumeration grew beyond its cap.
class SizeLimitExceeded : public Error {
 public:
  SizeLimitExceeded(const std::string& what, std::size_t cap)
      : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// A workflow net lacks a unique source or sink place.
class StructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace powlmine
