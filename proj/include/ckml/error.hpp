#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ckml {

// Root of every error the library throws. The CLI maps subclasses onto exit
// codes, so new error types must derive from one of the families below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (exit code 2 family).
class InputError : public Error {
 public:
  using Error::Error;
};

// A configured resource bound was exceeded (exit code 3 family).
class LimitError : public Error {
 public:
  using Error::Error;
};

class InvalidSetError : public InputError {
 public:
  using InputError::InputError;
};

class ContextError : public InputError {
 public:
  using InputError::InputError;
};

class AppositionError : public InputError {
 public:
  using InputError::InputError;
};

class UnknownConceptError : public InputError {
 public:
  using InputError::InputError;
};

class TheoryError : public InputError {
 public:
  using InputError::InputError;
};

class ScaleError : public InputError {
 public:
  using InputError::InputError;
};

class LoadError : public InputError {
 public:
  using InputError::InputError;
};

class EvalError : public InputError {
 public:
  using InputError::InputError;
};

class SqlError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : InputError(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A query outside the SQL-translatable fragment (exit code 4).
class UnsupportedQueryError : public Error {
 public:
  using Error::Error;
};

}  // namespace ckml
