#pragma once

#include <stdexcept>
#include <string>

namespace cisim {

/// Base for every error raised by the library. Callers that only need to
/// report a failure can catch this; the subclasses exist for control flow.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SignalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cisim
