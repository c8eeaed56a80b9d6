#pragma once

#include <stdexcept>
#include <string>

namespace pgnn {

// Bad input that the caller can fix (exit code 1 at the CLI).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyChainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class LengthFilterError : public ValidationError {
 public:
  LengthFilterError(const std::string& what, std::size_t length)
      : ValidationError(what), length_(length) {}
  std::size_t length() const { return length_; }

 private:
  std::size_t length_;
};

class AlignmentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Misuse of an API contract (backward on a non-scalar, a second backward pass, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Loss over zero unmasked positions.
class EmptyLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf encountered at runtime (exit code 2 at the CLI).
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pgnn
