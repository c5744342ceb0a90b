#pragma once

#include <stdexcept>
#include <string>

namespace scc5g {

// Machine-readable failure classes. CLI exit codes and error strings are
// derived from these, so additions must keep the existing order stable.
enum class ErrorClass {
  InvalidArgument,
  CorruptEncoding,
  TamperedDevice,
  ExhaustedKey,
  DuplicateUser,
  UnknownUser,
  AuthFailure,
  DigestMismatch,
  StateViolation,
  IoError,
  ConfigError,
};

const char* error_class_name(ErrorClass c);

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg)
      : std::runtime_error(std::string(error_class_name(cls)) + ": " + msg), cls_(cls) {}

  ErrorClass cls() const { return cls_; }

 private:
  ErrorClass cls_;
};

}  // namespace scc5g
