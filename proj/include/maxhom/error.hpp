#pragma once

#include <stdexcept>
#include <string>

namespace maxhom {

// Error kinds map one-to-one onto process exit codes at the CLI boundary:
// usage/format problems -> 2, resource caps -> 3, failed verification -> 4.
enum class Errc { Usage = 2, CapExceeded = 3, VerificationFailure = 4 };

struct Error : std::runtime_error {
  Errc kind;
  Error(Errc k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

[[noreturn]] inline void fail_usage(const std::string& what) {
  throw Error(Errc::Usage, what);
}
[[noreturn]] inline void fail_cap(const std::string& what) {
  throw Error(Errc::CapExceeded, what);
}
[[noreturn]] inline void fail_verify(const std::string& what) {
  throw Error(Errc::VerificationFailure, what);
}

inline void require_usage(bool ok, const std::string& what) {
  if (!ok) fail_usage(what);
}
inline void require_cap(bool ok, const std::string& what) {
  if (!ok) fail_cap(what);
}
inline void require_verify(bool ok, const std::string& what) {
  if (!ok) fail_verify(what);
}

} // namespace maxhom
