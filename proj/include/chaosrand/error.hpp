#pragma once

#include <stdexcept>
#include <string>

namespace chaosrand {

enum class Errc {
  invalid_input,
  not_ready,
  corrupted_state,
  source_unhealthy,
  source_exhausted,
  degenerate_input,
  io_error,
};

inline const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::not_ready: return "not-ready";
    case Errc::corrupted_state: return "corrupted-state";
    case Errc::source_unhealthy: return "source-unhealthy";
    case Errc::source_exhausted: return "source-exhausted";
    case Errc::degenerate_input: return "degenerate-input";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace chaosrand
