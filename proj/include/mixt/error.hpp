#pragma once

#include <stdexcept>
#include <string>

namespace mixt {

enum class ErrorCode {
  kDomain = 1,
  kShape,
  kInvalidBandwidth,
  kInvalidFamily,
  kSingularity,
  kAdjointMismatch,
  kNumeric,
  kDegenerateModel,
  kParse,
  kIo,
  kPrecondition,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// Warnings go to stderr unless silenced (tests and benchmarks silence them).
void warn(const std::string& message);
void set_warnings_enabled(bool enabled) noexcept;

}  // namespace mixt
