#pragma once

#include <stdexcept>
#include <string>

namespace genbench {

/// Base of every error raised by the library. Each category carries the
/// process exit code the CLI reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 4; }
};

/// Invalid option, unknown registry name, or a metric requested without its inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Anything wrong with input data: missing files, bad UTF-8, misaligned pairs.
class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class DecodeError : public DataError {
 public:
  using DataError::DataError;
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class SplitError : public DataError {
 public:
  using DataError::DataError;
};

/// Token id outside the vocabulary.
class RangeError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside one experiment phase; keeps the original exit code.
class PhaseError : public Error {
 public:
  PhaseError(std::string phase, const Error& cause)
      : Error(phase + ": " + cause.what()), phase_(std::move(phase)), code_(cause.exit_code()) {}
  const std::string& phase() const noexcept { return phase_; }
  int exit_code() const noexcept override { return code_; }

 private:
  std::string phase_;
  int code_;
};

}  // namespace genbench
