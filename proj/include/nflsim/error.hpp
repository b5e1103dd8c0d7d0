#pragma once

#include <stdexcept>
#include <string>

namespace nflsim {

// Base class for every error raised by the library. The CLI maps
// ValidationError / ConfigError to exit status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::string column)
      : Error(what), column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised whenever an operation would produce a PlayPool with no plays.
class EmptyPoolError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

// Network or transfer failure while fetching play-by-play data.
class FetchError : public Error {
 public:
  FetchError(const std::string& what, std::string url, bool retryable)
      : Error(what), url_(std::move(url)), retryable_(retryable) {}
  const std::string& url() const noexcept { return url_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  std::string url_;
  bool retryable_;
};

}  // namespace nflsim
