#pragma once

#include <stdexcept>
#include <string>

namespace lilis {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (bad geometry, k > N, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data could not be used: missing file, no valid rows, unreadable snapshot.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A snapshot file is structurally broken (magic, version, truncation, CRC).
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace lilis
