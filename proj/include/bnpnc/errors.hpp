#pragma once

#include <stdexcept>
#include <string>

namespace bnpnc {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError/ValidationError/ParseError -> 2
//   NumericalError/IdentificationError     -> 3
//   IoError                                -> 4
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Raised when the negative-control correction is undefined because the
// W-regression carries no signal from Z (assumptions A6/A7).
class IdentificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bnpnc
