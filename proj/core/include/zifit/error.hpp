#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zifit {

enum class ErrorKind {
  domain,
  unsupported,
  insufficient_data,
  boundary,
  singularity,
  starvation,
  no_equivalent,
  initialization,
  input,
  numerical,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace zifit
