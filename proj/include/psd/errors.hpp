#pragma once

#include <stdexcept>
#include <string>

namespace psd {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shapes of the operands do not agree.
struct DimensionError : Error {
  using Error::Error;
};

/// A configuration value violates its documented range.
struct ConfigError : Error {
  using Error::Error;
};

/// An iterative solve produced a non-finite objective or iterate.
struct DivergenceError : Error {
  using Error::Error;
};

/// A linear system has no unique solution (e.g. ridge with beta2 = 0).
struct SingularityError : Error {
  using Error::Error;
};

/// No spectral peak above the noise floor; direction estimation impossible.
struct NoPeriodicityError : Error {
  using Error::Error;
};

/// The pattern vector cannot normalize the requested operation.
struct DegenerateLambdaError : Error {
  using Error::Error;
};

/// A derived image (rotation crop) is too small to process.
struct TooSmallError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace psd
