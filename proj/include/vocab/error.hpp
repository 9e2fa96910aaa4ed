#pragma once

#include <stdexcept>
#include <string>

namespace vocab {

/// Base class for every error raised by the pipeline library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArk : public Error {
 public:
  using Error::Error;
};

class MinterExhausted : public Error {
 public:
  using Error::Error;
};

class InvalidScheme : public Error {
 public:
  using Error::Error;
};

class UnknownConcept : public Error {
 public:
  using Error::Error;
};

class InvalidEncoding : public Error {
 public:
  using Error::Error;
};

class EmptyResults : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vocab
