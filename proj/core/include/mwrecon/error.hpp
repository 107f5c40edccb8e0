#pragma once

#include <stdexcept>
#include <string>

namespace mwrecon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of two operands disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated on-disk data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int coil = -1) : Error(what), coil_(coil) {}
  int coil() const noexcept { return coil_; }

 private:
  int coil_;
};

}  // namespace mwrecon
