#include "mixt/error.hpp"

#include <atomic>
#include <iostream>

namespace mixt {

namespace {
std::atomic<bool> g_warnings_enabled{true};
}

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kInvalidBandwidth: return "invalid bandwidth";
    case ErrorCode::kInvalidFamily: return "invalid family";
    case ErrorCode::kSingularity: return "singularity";
    case ErrorCode::kAdjointMismatch: return "adjoint mismatch";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kDegenerateModel: return "degenerate model";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kPrecondition: return "precondition violated";
  }
  return "unknown error";
}

void warn(const std::string& message) {
  if (g_warnings_enabled.load(std::memory_order_relaxed)) {
    std::cerr << "warning: " << message << '\n';
  }
}

void set_warnings_enabled(bool enabled) noexcept {
  g_warnings_enabled.store(enabled, std::memory_order_relaxed);
}

}  // namespace mixt
