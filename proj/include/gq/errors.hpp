#pragma once

#include <stdexcept>
#include <string>

namespace gq {

// Input-side failures (malformed files, bad configs). CLI exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : InputError {
  using InputError::InputError;
};
struct ValueError : InputError {
  using InputError::InputError;
};
struct EmptyError : InputError {
  using InputError::InputError;
};
struct ConfigError : InputError {
  using InputError::InputError;
};
struct InvalidDirection : InputError {
  using InputError::InputError;
};
struct UnsupportedNorm : InputError {
  using InputError::InputError;
};
struct DomainError : InputError {
  using InputError::InputError;
};

// Numerical failures on otherwise valid input. CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularHessian : NumericalError {
  using NumericalError::NumericalError;
};
struct DegenerateError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace gq
