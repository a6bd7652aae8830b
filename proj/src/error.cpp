#include "lobbylink/error.hpp"

namespace lobbylink {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::duplicate_id: return "duplicate_id";
    case ErrorKind::dangling_reference: return "dangling_reference";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::io: return "io";
    case ErrorKind::not_fitted: return "not_fitted";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::offline_miss: return "offline_miss";
    case ErrorKind::timeout: return "timeout";
    case ErrorKind::malformed_response: return "malformed_response";
    case ErrorKind::invariant_violation: return "invariant_violation";
    case ErrorKind::provider_error: return "provider_error";
  }
  return "unknown";
}

}  // namespace lobbylink
