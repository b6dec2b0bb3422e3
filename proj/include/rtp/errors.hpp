#pragma once

#include <stdexcept>
#include <string>

namespace rtp {

// Base of everything the library throws on purpose. The CLI maps the
// subclasses onto exit codes (usage 1, data 2, numerical 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

enum class DataErrorKind {
  kEmptyFile,
  kMissingLabelColumn,
  kNonNumericCell,
  kRaggedRow,
  kDimensionMismatch,
  kConstantColumn,
  kEmptyInput,
  kUnknownIndex,
  kUnregisteredRow,
  kOther,
};

class DataError : public Error {
 public:
  DataError(DataErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  DataErrorKind kind() const noexcept { return kind_; }

 private:
  DataErrorKind kind_;
};

// Rejection loops that fail to terminate, degenerate polytopes, non-finite
// weights.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtp
