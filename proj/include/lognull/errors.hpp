#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lognull {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a data invariant (self-loop, duplicate, incomplete cover).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Partition for which a closed-form estimator is undefined (one community, all singletons).
class DegeneratePartitionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid or infeasible generator / strategy configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lognull
