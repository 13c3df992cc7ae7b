#include "mcsg/error.hpp"

namespace mcsg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::format: return "format error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::not_found: return "not found";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::empty_region: return "empty region";
    case ErrorKind::integrity: return "integrity error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace mcsg
