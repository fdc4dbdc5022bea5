#pragma once

#include <stdexcept>
#include <string>

namespace pdl {

// Invalid parameters, schedules or configuration files. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite state during stepping, or a readout that could not be classified.
// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what), time_(0.0) {}

  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  double time_;
};

// A site relaxed to the wrong bit (or to no bit) during initialization.
class InitializationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pdl
