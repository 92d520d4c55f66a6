#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace confsym {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checked rational arithmetic left the 64-bit range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Text that does not belong to the expression or problem-file grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(format(msg, line, column)), line_(line), column_(column), message_(msg) {}

  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }
  [[nodiscard]] const std::string& message() const { return message_; }

 private:
  static std::string format(const std::string& msg, std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
  }
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Numeric evaluation hit a point outside a function's domain.
class DomainError : public Error {
 public:
  DomainError(const std::string& msg, std::string subexpression)
      : Error(subexpression.empty() ? msg : msg + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}
  [[nodiscard]] const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

/// A free symbol had no value at evaluation time.
class UnboundSymbolError : public Error {
 public:
  explicit UnboundSymbolError(const std::string& name)
      : Error("unbound symbol '" + name + "'"), name_(name) {}
  [[nodiscard]] const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// The sampler could not find an admissible point within its retry budget.
class SamplerExhausted : public Error {
 public:
  using Error::Error;
};

class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

class ChartMismatch : public Error {
 public:
  using Error::Error;
};

/// Input that violates an operation's precondition (wrong shape, range, kind).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A reduction or closure computation could not be completed.
class ComputationFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace confsym
