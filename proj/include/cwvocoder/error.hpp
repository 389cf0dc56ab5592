#pragma once

#include <stdexcept>
#include <string>

namespace cwv {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The wavelet ladder produced no usable reconstruction response.
class CalibrationFailure : public Error {
 public:
  using Error::Error;
};

/// Residual prototype training found no voiced material.
class TrainingFailure : public Error {
 public:
  using Error::Error;
};

/// MLSA coefficients outside the Pade validity region.
class FilterInstability : public Error {
 public:
  FilterInstability(const std::string& what, std::size_t frame)
      : Error(what), frame_(frame) {}
  std::size_t frame() const noexcept { return frame_; }

 private:
  std::size_t frame_;
};

/// Two utterances whose durations differ too much to compare frame by frame.
class AlignmentFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The filesystem refused a read or write.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cwv
