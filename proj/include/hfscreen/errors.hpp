#pragma once

#include <stdexcept>
#include <string>

namespace hfscreen {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad invocation or configuration (CLI exit code 1).
struct UsageError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (CLI exit code 2).
struct DataError : Error {
  using Error::Error;
};

// Persisted file with an unknown version or a corrupt body.
struct FormatError : DataError {
  using DataError::DataError;
};

}  // namespace hfscreen
