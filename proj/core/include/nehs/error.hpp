#pragma once

#include <stdexcept>
#include <string>

namespace nehs {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file does not conform to its declared format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation's precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data is valid but too degenerate for the requested computation
// (zero variance, rank deficiency, ...).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// An iterative optimizer produced a non-finite value.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nehs
