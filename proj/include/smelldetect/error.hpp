#pragma once

#include <stdexcept>
#include <string>

namespace smelldetect {

// Base of every error thrown by the library. The CLI maps the subclasses
// onto exit codes: ConfigError -> 1, DataError -> 2, anything else -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data problems: unreadable files, malformed rows, bad labels.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LabelError : public DataError {
 public:
  using DataError::DataError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace smelldetect
