#include "ivxv/error.hpp"

namespace ivxv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::UnknownPreset: return "unknown-preset";
    case ErrorCode::InvalidParams: return "invalid-params";
    case ErrorCode::MessageOutOfRange: return "message-out-of-range";
    case ErrorCode::NotACandidate: return "not-a-candidate";
    case ErrorCode::RandomnessMismatch: return "randomness-mismatch";
    case ErrorCode::ThresholdExceedsShares: return "threshold-exceeds-shares";
    case ErrorCode::InsufficientShares: return "insufficient-shares";
    case ErrorCode::DuplicateShare: return "duplicate-share";
    case ErrorCode::BadWitness: return "bad-witness";
    case ErrorCode::Malformed: return "malformed";
    case ErrorCode::InvalidSession: return "invalid-session";
    case ErrorCode::AccessDenied: return "access-denied";
    case ErrorCode::NotReady: return "not-ready";
    case ErrorCode::ThresholdNotMet: return "threshold-not-met";
    case ErrorCode::MissingShuffle: return "missing-shuffle";
    case ErrorCode::UnknownSsid: return "unknown-ssid";
    case ErrorCode::Unauthorized: return "unauthorized";
    case ErrorCode::InvalidDistribution: return "invalid-distribution";
    case ErrorCode::InvalidPolicy: return "invalid-policy";
    case ErrorCode::HistoryTooLong: return "history-too-long";
    case ErrorCode::MaxLenExceeded: return "max-len-exceeded";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::Protocol: return "protocol";
  }
  return "unknown";
}

}  // namespace ivxv
