#pragma once

#include <stdexcept>
#include <string>

namespace fcsd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (alpha out of range, grid too small, empty Θ0, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// An input value outside the domain of the operation (e.g. an observation outside [0,1]).
struct DomainError : Error {
  using Error::Error;
};

/// Operation not allowed in the current state, e.g. stepping a stopped detector.
struct StateError : Error {
  using Error::Error;
};

/// A documented precondition of an oracle was not met.
struct PreconditionError : Error {
  using Error::Error;
};

inline void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
  }
}

}  // namespace fcsd
