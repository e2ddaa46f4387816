#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsl {

enum class ErrorCode {
  NotFound,
  InconsistentDimensions,
  UnsupportedFormat,
  PatchTooSmall,
  InvalidParameter,
  RegionOutOfBounds,
  ShapeError,
  DegenerateGroundTruth,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::PatchTooSmall: return "PatchTooSmall";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::RegionOutOfBounds: return "RegionOutOfBounds";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::DegenerateGroundTruth: return "DegenerateGroundTruth";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// NotFound raised by load_frame_sequence; carries the missing frame index.
class NotFoundError : public Error {
 public:
  NotFoundError(long index, const std::string& path)
      : Error(ErrorCode::NotFound, "frame " + std::to_string(index) + " (" + path + ")"),
        index_(index) {}

  long index() const noexcept { return index_; }

 private:
  long index_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace vsl
