#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace divot {

enum class ErrorKind {
  parse,
  insufficient_data,
  degenerate_data,
  shape,
  numeric,
  too_large,
  invalid_argument,
  io,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this one exception type; the
// kind lets callers (and the CLI) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failure tied to a 1-based input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace divot
