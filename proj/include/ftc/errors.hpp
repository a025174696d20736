#pragma once

#include <stdexcept>
#include <string>

namespace ftc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or incomplete configuration (unknown keys, missing parameters, bad ranges).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, degenerate geometry, or other numerical breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A trajectory left the guard box around the flow domain.
class EscapeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ftc
