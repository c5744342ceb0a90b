#include "scc5g/errors.hpp"

namespace scc5g {

const char* error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::InvalidArgument: return "invalid-argument";
    case ErrorClass::CorruptEncoding: return "corrupt-encoding";
    case ErrorClass::TamperedDevice: return "tampered-device";
    case ErrorClass::ExhaustedKey: return "exhausted-key";
    case ErrorClass::DuplicateUser: return "duplicate-user";
    case ErrorClass::UnknownUser: return "unknown-user";
    case ErrorClass::AuthFailure: return "auth-failure";
    case ErrorClass::DigestMismatch: return "digest-mismatch";
    case ErrorClass::StateViolation: return "state-violation";
    case ErrorClass::IoError: return "io-error";
    case ErrorClass::ConfigError: return "config-error";
  }
  return "unknown";
}

}  // namespace scc5g
