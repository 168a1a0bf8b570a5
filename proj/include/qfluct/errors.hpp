#pragma once

#include <stdexcept>
#include <string>

namespace qfluct {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain model or circuit parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A spin label (s, s_z) that does not exist for the requested N.
class InvalidSectorError : public Error {
 public:
  using Error::Error;
};

/// Odd N, which the Cooper-pair picture excludes.
class UnsupportedParityError : public Error {
 public:
  using Error::Error;
};

/// The gap vanishes, so fluctuation operators S_±/(cN) are undefined.
class NormalPhaseError : public Error {
 public:
  using Error::Error;
};

/// A requested state cannot be resolved on the chosen charge truncation.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver or exponentiation failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfluct
