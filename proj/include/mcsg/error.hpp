#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcsg {

enum class ErrorKind {
  invalid_argument,
  format,
  validation,
  not_found,
  insufficient_data,
  empty_region,
  integrity,
  io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so that the C API and
// the HTTP layer can map it onto a status code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace mcsg
