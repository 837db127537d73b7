#pragma once

#include <stdexcept>
#include <string>

namespace hypokit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates the range declared by the module that owns it.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and an operator) disagree on their axes.
class AxisMismatch : public Error {
 public:
  using Error::Error;
};

/// A dilation or shear moved non-negligible mass across the box boundary.
class SupportOverflow : public Error {
 public:
  using Error::Error;
};

/// A dense assembly would exceed the configured memory budget.
class ResourceGuard : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-range experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hypokit
