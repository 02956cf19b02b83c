#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hope {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An engine, unit or project id that is not registered.
class NotFoundError : public Error {
public:
  using Error::Error;
};

/// Input data that violates a documented precondition (ragged TSV rows,
/// empty references, mismatched line counts, ...).
class DataError : public Error {
public:
  using Error::Error;
};

/// A rate whose denominator would be zero.
class UndefinedRateError : public DataError {
public:
  using DataError::DataError;
};

/// Malformed project or report document. Line and column are 1-based;
/// zero means the location is a structural path rather than a text offset.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedSchemaError : public Error {
public:
  explicit UnsupportedSchemaError(std::int64_t version)
      : Error("unsupported schema version " + std::to_string(version)), version_(version) {}

  std::int64_t version() const noexcept { return version_; }

private:
  std::int64_t version_;
};

/// Carries every invariant violation found; raised where a valid value is required.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed";
    for (const auto& s : v) {
      out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace hope
