#pragma once

#include <stdexcept>
#include <string>

namespace brine {

/// Parameter failed an invariant check. The message names the offending field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a mathematical function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Salt concentration cannot be accommodated (an occupation probability would exceed one).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The variational problem has a flat set of minimizers rather than a unique one.
class NonUniqueError : public std::runtime_error {
 public:
  NonUniqueError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}

  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace brine
