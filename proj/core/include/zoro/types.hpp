#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace zoro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

// Error taxonomy. Every failure surfaced by the library is one of these.

/// A caller broke a documented precondition (wrong dimension, bad argument).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A problem or regularizer was constructed from inconsistent parameters.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The objective is undefined at the requested point (e.g. zero portfolio sum).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The oracle returned a non-finite value. Carries the ledger index of the query.
class EvaluationFailure : public std::runtime_error {
 public:
  EvaluationFailure(const std::string& what, std::uint64_t query_index)
      : std::runtime_error(what), query_index_(query_index) {}
  std::uint64_t query_index() const noexcept { return query_index_; }

 private:
  std::uint64_t query_index_;
};

/// Malformed input file; line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, int column, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zoro
