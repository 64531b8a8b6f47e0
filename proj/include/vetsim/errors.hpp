#pragma once

#include <stdexcept>
#include <string>

namespace vetsim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GimbalSingularity : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotDetected : public Error {
 public:
  using Error::Error;
};

class InvalidBounds : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class UnknownPreset : public Error {
 public:
  using Error::Error;
};

class EmptyLog : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable configuration text.
class ConfigParse : public Error {
 public:
  using Error::Error;
};

class CsvParse : public Error {
 public:
  using Error::Error;
};

}  // namespace vetsim
