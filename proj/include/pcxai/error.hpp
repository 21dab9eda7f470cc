// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcxai {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Violated precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptySegment : public Error {
 public:
  using Error::Error;
};

class EmptyRetainedSet : public Error {
 public:
  using Error::Error;
};

// External classifier: spawn, handshake or wire-level failures.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class SpawnError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

}  // namespace pcxai
