#pragma once

#include <stdexcept>
#include <string>

namespace lidarcal {

// Failure categories surfaced by the calibration stages. The pipeline maps
// these onto per-trial failure reasons instead of aborting a whole batch.
enum class ErrorCode {
  kInvalidArgument,
  kNoGroundFound,
  kAmbiguousGround,
  kDegenerateScene,
  kNoOverlap,
  kCorrespondenceStarvation,
  kDegenerateDecomposition,
  kParseError,
  kIoError,
};

const char* error_code_name(ErrorCode code);

class CalibError : public std::runtime_error {
 public:
  CalibError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lidarcal
