#pragma once

#include <stdexcept>
#include <string>

namespace lobbylink {

enum class ErrorKind {
  parse,
  duplicate_id,
  dangling_reference,
  invalid_argument,
  precondition,
  io,
  not_fitted,
  degenerate,
  offline_miss,
  timeout,
  malformed_response,
  invariant_violation,
  provider_error,
};

const char* to_string(ErrorKind kind) noexcept;

/// The single exception type thrown by the library. The kind drives CLI exit
/// codes and the machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lobbylink
