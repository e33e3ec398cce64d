#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input: tables, registry files, run configurations.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A quadrature or a Matsubara sum failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int matsubara_index, double achieved)
      : std::runtime_error(what), index_(matsubara_index), achieved_(achieved) {}
  int matsubara_index() const { return index_; }
  double achieved() const { return achieved_; }

 private:
  int index_;
  double achieved_;
};

class NoCrossing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency check failed (e.g. |r| > 1).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace casimir
