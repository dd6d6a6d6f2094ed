#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qforest {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: out-of-range qubit counts, epochs = 0, single-class
/// training data, folds larger than a class, ...
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shape or index mismatch between arguments.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinite values where finite numbers are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset input. Carries the 1-based line number when known.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A metric is undefined for the given input (e.g. AUC with one class).
class MetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qforest
