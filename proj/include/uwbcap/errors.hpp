#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uwbcap {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two signals with different grid steps were combined.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Requested lowpass bandwidth exceeds what the grid can represent.
class BandwidthExceedsGrid : public Error {
 public:
  using Error::Error;
};

/// A requested evaluation time lies outside the represented extent.
class TimeOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A sub-sample offset lies outside [0, T).
class OffsetOutOfRange : public Error {
 public:
  using Error::Error;
};

/// An acquisition search window contains no candidate positions.
class EmptyWindow : public Error {
 public:
  using Error::Error;
};

/// A reference (brute-force) routine was handed more data than its guard allows.
class SizeGuardExceeded : public Error {
 public:
  using Error::Error;
};

/// An energy-relative check was asked about a zero-energy signal.
class ZeroEnergyInput : public Error {
 public:
  using Error::Error;
};

/// Cluster-model parameters that cannot produce a usable channel.
class DegenerateParams : public Error {
 public:
  using Error::Error;
};

/// Invalid sweep or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failure (open/read/write).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed CIR file content. Carries 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// CIR file whose version tag is not understood.
class UnsupportedVersion : public Error {
 public:
  using Error::Error;
};

}  // namespace uwbcap
