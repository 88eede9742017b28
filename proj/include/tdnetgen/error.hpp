#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tdnetgen {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (unknown family, bad schedule, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values produced by a numerical routine.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Root finding / bifurcation scan failed to locate a transition.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// ODE integration left the finite range.
class SimulationDiverged : public Error {
 public:
  SimulationDiverged(std::size_t time_index, const std::string& what)
      : Error(what + " (time index " + std::to_string(time_index) + ")"),
        time_index_(time_index) {}

  std::size_t time_index() const noexcept { return time_index_; }

 private:
  std::size_t time_index_;
};

}  // namespace tdnetgen
