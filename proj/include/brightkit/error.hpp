// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace brightkit {

/// Broad failure class. The CLI maps each kind to its exit code.
enum class ErrorKind { usage, data, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {})
      : std::runtime_error(message), kind_(kind), path_(std::move(path)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

/// Malformed or semantically invalid input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message, std::string path = {})
      : Error(ErrorKind::data, message, std::move(path)) {}
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& message, std::string path = {})
      : Error(ErrorKind::io, message, std::move(path)) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorKind::usage, message) {}
};

}  // namespace brightkit
