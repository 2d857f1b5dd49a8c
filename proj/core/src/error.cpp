#include "divot/error.hpp"

namespace divot {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::degenerate_data: return "degenerate data";
    case ErrorKind::shape: return "shape mismatch";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::too_large: return "problem too large";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace divot
