#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace luba {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An iterative routine exhausted its budget before reaching tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No admissible solution inside the search bracket.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A recurrence hit its iteration cap; carries the frequencies computed so far.
struct TruncationError : std::runtime_error {
  TruncationError(const std::string& msg, double lambda, std::vector<double> partial)
      : std::runtime_error(msg), lambda(lambda), partial_freqs(std::move(partial)) {}
  double lambda;
  std::vector<double> partial_freqs;
};

/// Malformed input file; `line` is 1-based.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

/// A filter or selection matched nothing.
struct SelectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A statistical fit is not defined for the given data.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be opened or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace luba
