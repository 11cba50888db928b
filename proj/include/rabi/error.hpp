#pragma once

#include <stdexcept>
#include <string>

namespace rabi {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or spaces do not fit together.
class DimensionError : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Coherent-state truncation exceeds the allowed Poisson tail.
/// Carries the smallest n_max that would have been accepted.
class TruncationError : public Error {
public:
  TruncationError(const std::string &what, int required_n_max)
      : Error(what), required_n_max_(required_n_max) {}
  int required_n_max() const noexcept { return required_n_max_; }

private:
  int required_n_max_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Requested comparison or model combination has no implementation.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace rabi
