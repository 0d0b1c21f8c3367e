#pragma once

#include <stdexcept>
#include <string>

namespace hess {

// Bad input: malformed files, violated invariants, inconsistent configuration.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax error in a scene or scenario file, annotated with 1-based line/column.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ValidationError(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Failure while running a simulation: instability, non-finite field,
// energy-audit violation, root-finder non-convergence.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hess
