#pragma once

#include <stdexcept>
#include <string>

namespace kzp {

enum class ErrorCode {
  Argument,          // parameter outside its domain
  Parse,             // malformed input text
  Structure,         // well-formed input with inconsistent layout
  Io,                // file system failure
  InsufficientData,  // too few observed points for the requested estimate
  Unsupported,       // input valid in general but not for this operation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::Argument, what);
}

}  // namespace kzp
