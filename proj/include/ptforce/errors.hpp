#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptforce {

enum class ErrorCode {
  IllFormed,
  NotInTree,
  SystemUnavailable,
  StemDepthExceeded,
  NotMember,
  HeightZero,
  ChainStalled,
  SeqMismatch,
  LengthMismatch,
  RefinerContract,
  ScheduleMissing,
  HorizonExceeded,
  NotUForm,
  ConditionOneFails,
  StepConflict,
  OracleFailure,
  NotMet,
  StageOrder,
  StageBudget,
  ParseError,
  ConfigError,
};

std::string_view errorName(ErrorCode code) noexcept;

/// Every library failure carries one of the documented codes so callers
/// (notably the CLI) can map it to a message and exit status.
class ForcingError : public std::runtime_error {
 public:
  ForcingError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(errorName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw ForcingError(code, what);
}

}  // namespace ptforce
