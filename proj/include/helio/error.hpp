// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace helio {

/// Process-level status codes shared by the C API and the CLI.
enum class Status : int {
  ok = 0,
  invalid_argument = 1,
  config = 2,
  io = 3,
  numeric = 4,
};

/// Base for every error raised by the library; carries the status it maps to.
class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

/// Argument outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(Status::invalid_argument, what) {}
};

/// Violated precondition on structured inputs (shapes, set relations).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(Status::invalid_argument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Status::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Status::io, what) {}
};

/// Singular systems, non-finite losses and other numerical breakdowns.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(Status::numeric, what) {}
};

}  // namespace helio
