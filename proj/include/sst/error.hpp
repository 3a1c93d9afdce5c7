#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A word or machine refers to a variable or symbol outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed machine description or violated construction precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or construction exceeded its configured budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::size_t progress)
      : Error(what + " (progress: " + std::to_string(progress) + ")"), progress_(progress) {}

  std::size_t progress() const noexcept { return progress_; }

 private:
  std::size_t progress_;
};

/// A summary operator reached a missing transition of a partial machine.
class UndefinedSummaryError : public Error {
 public:
  using Error::Error;
};

/// Bounded relation composition needed an intermediate word the right-hand
/// relation was not computed for.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Text-format syntax error carrying its source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace sst
