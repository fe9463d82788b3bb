#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ivxv {

enum class ErrorCode {
  InvalidArgument,
  UnknownPreset,
  InvalidParams,
  MessageOutOfRange,
  NotACandidate,
  RandomnessMismatch,
  ThresholdExceedsShares,
  InsufficientShares,
  DuplicateShare,
  BadWitness,
  Malformed,
  InvalidSession,
  AccessDenied,
  NotReady,
  ThresholdNotMet,
  MissingShuffle,
  UnknownSsid,
  Unauthorized,
  InvalidDistribution,
  InvalidPolicy,
  HistoryTooLong,
  MaxLenExceeded,
  Config,
  Io,
  Protocol,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the core carries one of the codes above; the C API
// maps them onto integer status values.
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

}  // namespace ivxv
