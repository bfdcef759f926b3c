#pragma once

#include <stdexcept>
#include <string>

namespace eas {

/// Argument outside the mathematical domain of an operation (x = 0 for a
/// singular kernel, alpha outside (0,2), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an operation was not met by the caller.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance or produced a
/// non-finite value.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double achieved_error = 0.0)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// The simulated state left the regime where the dynamics are defined
/// (vacuum, blow-up signature).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derived quantity is not representable (e.g. an exponentially small
/// density floor underflows).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string key = {})
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace eas
