#pragma once

#include <stdexcept>
#include <string>

namespace ctm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf produced or consumed, or a degenerate value such as a zero norm.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary file; the message carries the byte offset.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctm
