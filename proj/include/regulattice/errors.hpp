#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regulattice {

/// Argument outside an operation's domain (empty subset, mismatched ground sets, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The zero matrix has no normalized form.
class NormalizationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exhaustive check requested on a block larger than the oracle limit.
class OracleLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A witness could not be brought into the gain-split size window.
class ShrinkFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// rebalance produced no nonexceptional classes.
class RebalanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A refinement step's preconditions do not hold.
class StepRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix too small for the requested accuracy and class count.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime-checked guarantee failed. Always a bug or a bad witness.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace regulattice
