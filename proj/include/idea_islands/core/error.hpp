#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace idea_islands {

enum class ErrorCode {
  SequenceGap,
  InvalidReference,
  UnknownEventKind,
  InvalidArgument,
  EmptyTranscript,
  MissingDelimiter,
  EmptySegment,
  ProviderTimeout,
  ProviderFailure,
  ParseFailure,
  SlotOutOfRange,
  NotImmersed,
  NotInOverview,
  UnknownIsland,
  OrbOutOfRange,
  TimeRegression,
  DegenerateMapping,
  NonPositiveDuration,
  IncompletePartition,
  StorageFailure,
  CorruptLine,
  UnknownSession,
  MalformedMessage,
  SessionClosed,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SequenceGap: return "SequenceGap";
    case ErrorCode::InvalidReference: return "InvalidReference";
    case ErrorCode::UnknownEventKind: return "UnknownEventKind";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyTranscript: return "EmptyTranscript";
    case ErrorCode::MissingDelimiter: return "MissingDelimiter";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::ProviderTimeout: return "ProviderTimeout";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::SlotOutOfRange: return "SlotOutOfRange";
    case ErrorCode::NotImmersed: return "NotImmersed";
    case ErrorCode::NotInOverview: return "NotInOverview";
    case ErrorCode::UnknownIsland: return "UnknownIsland";
    case ErrorCode::OrbOutOfRange: return "OrbOutOfRange";
    case ErrorCode::TimeRegression: return "TimeRegression";
    case ErrorCode::DegenerateMapping: return "DegenerateMapping";
    case ErrorCode::NonPositiveDuration: return "NonPositiveDuration";
    case ErrorCode::IncompletePartition: return "IncompletePartition";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::CorruptLine: return "CorruptLine";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::SessionClosed: return "SessionClosed";
  }
  return "Unknown";
}

// Every failure raised by the engine carries one of the codes above; the
// service layer forwards the code verbatim in Error frames.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace idea_islands
