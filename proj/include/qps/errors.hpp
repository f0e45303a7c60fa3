#pragma once

#include <stdexcept>
#include <string>

namespace qps {

enum class ErrorKind {
  InstanceTooLarge,        // dense dimension cap exceeded
  ContractViolation,       // an invariant the caller promised does not hold
  InvalidSpec,             // malformed generator spec / parameters
  NotInformationallyComplete, // rank-deficient POVM reconstruction
  InvalidArgument,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InstanceTooLarge: return "instance-too-large";
    case ErrorKind::ContractViolation: return "contract-violation";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::NotInformationallyComplete: return "not-informationally-complete";
    case ErrorKind::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool ok, ErrorKind kind, const std::string& msg) {
  if (!ok) fail(kind, msg);
}

} // namespace qps
