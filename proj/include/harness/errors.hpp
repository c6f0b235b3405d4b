#pragma once

#include <stdexcept>
#include <string>

namespace harness {

// Machine-readable failure codes, mirrored 1:1 in CLI error JSON.
enum class ErrorCode {
  RejectedKernel,
  DimensionUnsupported,
  WindowTooSmall,
  ResourceLimit,
  UnsupportedOrder,
  ConfigError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string what) : std::runtime_error(std::move(what)), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class KernelReject {
  NotProbability,
  RangeExceeded,
  Degenerate,
  NotStronglyAperiodic,
  ZeroVariance,
};

inline const char* to_string(KernelReject r) {
  switch (r) {
    case KernelReject::NotProbability: return "not-probability";
    case KernelReject::RangeExceeded: return "range-exceeded";
    case KernelReject::Degenerate: return "degenerate";
    case KernelReject::NotStronglyAperiodic: return "not-strongly-aperiodic";
    case KernelReject::ZeroVariance: return "zero-variance";
  }
  return "unknown";
}

class RejectedKernel : public Error {
 public:
  RejectedKernel(KernelReject reason, std::string detail)
      : Error(ErrorCode::RejectedKernel,
              std::string("kernel rejected: ") + to_string(reason) + (detail.empty() ? "" : " (" + detail + ")")),
        reason_(reason) {}
  KernelReject reason() const noexcept { return reason_; }

 private:
  KernelReject reason_;
};

class DimensionUnsupported : public Error {
 public:
  explicit DimensionUnsupported(std::string what) : Error(ErrorCode::DimensionUnsupported, std::move(what)) {}
};

class WindowTooSmall : public Error {
 public:
  explicit WindowTooSmall(std::string what) : Error(ErrorCode::WindowTooSmall, std::move(what)) {}
};

class ResourceLimit : public Error {
 public:
  explicit ResourceLimit(std::string what) : Error(ErrorCode::ResourceLimit, std::move(what)) {}
};

class UnsupportedOrder : public Error {
 public:
  explicit UnsupportedOrder(std::string what) : Error(ErrorCode::UnsupportedOrder, std::move(what)) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::string what) : Error(ErrorCode::ConfigError, std::move(what)) {}
};

}  // namespace harness
